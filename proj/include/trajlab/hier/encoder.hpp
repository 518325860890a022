#pragma once

#include <vector>

#include "trajlab/core/mlp.hpp"
#include "trajlab/core/rng.hpp"
#include "trajlab/core/types.hpp"
#include "trajlab/hier/trajectory.hpp"

namespace trajlab::hier {

/// Token-table + projection-head encoder: windows are mean-pooled over their
/// non-PAD token rows, pushed through the head MLP, then l2-normalized.
struct LevelEncoder {
  Mat token_table;  // vocab x d
  MlpParams head;   // d -> d

  Eigen::Index vocab() const { return token_table.rows(); }
  Eigen::Index dim() const { return token_table.cols(); }
};

LevelEncoder make_level_encoder(Eigen::Index vocab, Eigen::Index dim,
                                Eigen::Index hidden, Rng& rng);

/// Throws DimensionError on out-of-vocabulary tokens and
/// DegenerateInputError when the pooled/projected vector has zero norm.
Vec encode_window(const LevelEncoder& enc, const std::vector<int>& tokens);

std::vector<Vec> encode_level(const LevelEncoder& enc,
                              const SegmentCollection& seg);

/// Gradient accumulator shaped like a LevelEncoder.
struct EncoderGrads {
  Mat token_table;
  MlpParams head;
};

EncoderGrads zero_encoder_grads(const LevelEncoder& enc);

/// Accumulates d<dz, encode_window(enc, tokens)>/d(enc) into `acc`.
void encode_window_backward(const LevelEncoder& enc,
                            const std::vector<int>& tokens, const Vec& dz,
                            EncoderGrads& acc);

}  // namespace trajlab::hier
