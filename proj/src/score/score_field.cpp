#include "trajlab/score/score_field.hpp"

#include <cstring>

#include "trajlab/core/errors.hpp"

namespace trajlab::score {

namespace {

Vec concat(const Vec& z, const Vec& p) {
  Vec zp(z.size() + p.size());
  zp.head(z.size()) = z;
  zp.tail(p.size()) = p;
  return zp;
}

std::uint64_t fnv1a(std::uint64_t h, const double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

// Per-pair noise stream keyed on the pair's content (not its batch slot):
// duplicated pairs share one draw, so mean-reduction identities hold exactly,
// while distinct rng arguments still refresh the noise between calls.
std::uint64_t pair_stream(const ScorePair& pair) {
  std::uint64_t h = fnv1a(0xCBF29CE484222325ULL, pair.z.data(), pair.z.size());
  return fnv1a(h, pair.p.data(), pair.p.size());
}

// Single pass computing the loss and, when grad != nullptr, its parameter
// gradient.
double loss_impl(const ScoreNet& net, const ScoreBatch& batch, Rng rng,
                 MlpParams* grad) {
  if (batch.empty()) throw DegenerateInputError("score_loss: empty batch");
  const double inv_var = 1.0 / (net.sigma * net.sigma);
  const double scale = 1.0 / static_cast<double>(batch.size());

  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& pair = batch[i];
    if (pair.z.size() + pair.p.size() != net.params.in_dim()) {
      throw DimensionError("score_loss: pair dimension does not match net");
    }
    Rng pair_rng = rng.split(pair_stream(pair));
    const auto [z_noisy, xi] = perturb(pair.z, net.sigma, pair_rng);
    const Vec input = concat(z_noisy, pair.p);
    const Vec pred = mlp_forward(net.params, input);
    const Vec target = -xi * inv_var;
    const Vec resid = pred - target;
    total += resid.squaredNorm();
    if (grad != nullptr) {
      const Vec dy = 2.0 * scale * resid;
      MlpBackward bw = mlp_backward(net.params, input, dy);
      grad->w1 += bw.dparams.w1;
      grad->b1 += bw.dparams.b1;
      grad->w2 += bw.dparams.w2;
      grad->b2 += bw.dparams.b2;
    }
  }
  return total * scale;
}

}  // namespace

ScoreNet make_score_net(Eigen::Index dim, Eigen::Index hidden, double sigma,
                        Rng& rng) {
  ScoreNet net;
  net.params = MlpParams::glorot(2 * dim, hidden, dim, rng);
  net.sigma = sigma;
  return net;
}

std::pair<Vec, Vec> perturb(const Vec& z, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw DegenerateInputError("perturb: sigma must be > 0");
  Vec xi(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) xi[i] = sigma * rng.gaussian();
  return {z + xi, xi};
}

double score_loss(const ScoreNet& net, const ScoreBatch& batch, Rng rng) {
  return loss_impl(net, batch, rng, nullptr);
}

MlpParams score_loss_grad(const ScoreNet& net, const ScoreBatch& batch,
                          Rng rng) {
  MlpParams grad = MlpParams::zeros(net.params.in_dim(), net.params.hidden_dim(),
                                    net.params.out_dim());
  loss_impl(net, batch, rng, &grad);
  return grad;
}

Vec score_query(const ScoreNet& net, const Vec& z, const Vec& p) {
  if (z.size() + p.size() != net.params.in_dim()) {
    throw DimensionError("score_query: dimension mismatch");
  }
  return mlp_forward(net.params, concat(z, p));
}

}  // namespace trajlab::score
