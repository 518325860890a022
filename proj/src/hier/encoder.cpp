#include "trajlab/hier/encoder.hpp"

#include <cmath>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/numeric.hpp"

namespace trajlab::hier {

namespace {

// Mean of the non-PAD token rows. Returns the count of pooled tokens.
int pool_window(const LevelEncoder& enc, const std::vector<int>& tokens,
                Vec& mean) {
  mean = Vec::Zero(enc.dim());
  int count = 0;
  for (int tok : tokens) {
    if (tok == kPadToken) continue;
    if (tok < 0 || tok >= enc.vocab()) {
      throw DimensionError("encode_window: token id outside vocabulary");
    }
    mean += enc.token_table.row(tok).transpose();
    ++count;
  }
  if (count == 0) {
    throw DegenerateInputError("encode_window: window holds only PAD tokens");
  }
  mean /= static_cast<double>(count);
  return count;
}

}  // namespace

LevelEncoder make_level_encoder(Eigen::Index vocab, Eigen::Index dim,
                                Eigen::Index hidden, Rng& rng) {
  LevelEncoder enc;
  enc.token_table = Mat(vocab, dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < enc.token_table.size(); ++i) {
    enc.token_table.data()[i] = s * rng.gaussian();
  }
  enc.head = MlpParams::glorot(dim, hidden, dim, rng);
  return enc;
}

Vec encode_window(const LevelEncoder& enc, const std::vector<int>& tokens) {
  Vec mean;
  pool_window(enc, tokens, mean);
  return l2_normalize(mlp_forward(enc.head, mean));
}

std::vector<Vec> encode_level(const LevelEncoder& enc,
                              const SegmentCollection& seg) {
  std::vector<Vec> zs;
  zs.reserve(seg.windows.size());
  for (const auto& w : seg.windows) zs.push_back(encode_window(enc, w));
  return zs;
}

EncoderGrads zero_encoder_grads(const LevelEncoder& enc) {
  EncoderGrads g;
  g.token_table = Mat::Zero(enc.token_table.rows(), enc.token_table.cols());
  g.head = MlpParams::zeros(enc.head.in_dim(), enc.head.hidden_dim(),
                            enc.head.out_dim());
  return g;
}

void encode_window_backward(const LevelEncoder& enc,
                            const std::vector<int>& tokens, const Vec& dz,
                            EncoderGrads& acc) {
  Vec mean;
  const int count = pool_window(enc, tokens, mean);
  const Vec pre_norm = mlp_forward(enc.head, mean);
  const Vec d_pre = l2_normalize_backward(pre_norm, dz);
  MlpBackward bw = mlp_backward(enc.head, mean, d_pre);
  acc.head.w1 += bw.dparams.w1;
  acc.head.b1 += bw.dparams.b1;
  acc.head.w2 += bw.dparams.w2;
  acc.head.b2 += bw.dparams.b2;
  const Vec d_row = bw.dx / static_cast<double>(count);
  for (int tok : tokens) {
    if (tok == kPadToken) continue;
    acc.token_table.row(tok) += d_row.transpose();
  }
}

}  // namespace trajlab::hier
