#include "trajlab/hier/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

namespace {

constexpr char kMagic[4] = {'T', 'L', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw DataError("checkpoint: truncated file");
  return v;
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw DataError("checkpoint: truncated file");
  return v;
}
double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw DataError("checkpoint: truncated file");
  return v;
}
std::string read_str(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n > (1u << 20)) throw DataError("checkpoint: implausible string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw DataError("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const HierState& state) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("checkpoint: cannot open for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);

  const HierConfig& c = state.cfg;
  write_u32(os, static_cast<std::uint32_t>(c.vocab));
  write_u32(os, static_cast<std::uint32_t>(c.dim));
  write_u32(os, static_cast<std::uint32_t>(c.hidden));
  write_u32(os, static_cast<std::uint32_t>(c.action_window.window_len));
  write_u32(os, static_cast<std::uint32_t>(c.action_window.stride));
  write_u32(os, static_cast<std::uint32_t>(c.subgoal_window.window_len));
  write_u32(os, static_cast<std::uint32_t>(c.subgoal_window.stride));
  write_u32(os, static_cast<std::uint32_t>(c.negatives));
  write_f64(os, c.tau);
  write_f64(os, c.lambda_pred_action);
  write_f64(os, c.lambda_pred_subgoal);
  write_f64(os, c.lambda_score_action);
  write_f64(os, c.lambda_score_subgoal);
  write_f64(os, c.lambda_sinkhorn);
  write_f64(os, c.score_sigma);
  write_f64(os, c.sinkhorn.eps);
  write_u32(os, static_cast<std::uint32_t>(c.sinkhorn.max_iter));
  write_f64(os, c.sinkhorn.tol);

  auto views = tensor_views(const_cast<HierState&>(state));
  write_u32(os, static_cast<std::uint32_t>(views.size()));
  for (const TensorView& tv : views) {
    write_str(os, tv.name);
    write_u64(os, static_cast<std::uint64_t>(tv.rows));
    write_u64(os, static_cast<std::uint64_t>(tv.cols));
    os.write(reinterpret_cast<const char*>(tv.data),
             static_cast<std::streamsize>(tv.size * sizeof(double)));
  }
  if (!os) throw DataError("checkpoint: write failed: " + path);
}

HierState load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("checkpoint: cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("checkpoint: bad magic: " + path);
  }
  const std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }

  HierConfig c;
  c.vocab = static_cast<int>(read_u32(is));
  c.dim = static_cast<int>(read_u32(is));
  c.hidden = static_cast<int>(read_u32(is));
  c.action_window.window_len = static_cast<int>(read_u32(is));
  c.action_window.stride = static_cast<int>(read_u32(is));
  c.subgoal_window.window_len = static_cast<int>(read_u32(is));
  c.subgoal_window.stride = static_cast<int>(read_u32(is));
  c.negatives = static_cast<int>(read_u32(is));
  c.tau = read_f64(is);
  c.lambda_pred_action = read_f64(is);
  c.lambda_pred_subgoal = read_f64(is);
  c.lambda_score_action = read_f64(is);
  c.lambda_score_subgoal = read_f64(is);
  c.lambda_sinkhorn = read_f64(is);
  c.score_sigma = read_f64(is);
  c.sinkhorn.eps = read_f64(is);
  c.sinkhorn.max_iter = static_cast<int>(read_u32(is));
  c.sinkhorn.tol = read_f64(is);

  Rng init(0);
  HierState state = make_hier_state(c, init);
  auto views = tensor_views(state);
  const std::uint32_t count = read_u32(is);
  if (count != views.size()) {
    throw DataError("checkpoint: tensor count mismatch");
  }
  for (TensorView& tv : views) {
    const std::string name = read_str(is);
    if (name != tv.name) throw DataError("checkpoint: tensor order mismatch: " + name);
    const auto rows = static_cast<Eigen::Index>(read_u64(is));
    const auto cols = static_cast<Eigen::Index>(read_u64(is));
    if (rows != tv.rows || cols != tv.cols) {
      throw DataError("checkpoint: tensor shape mismatch: " + name);
    }
    is.read(reinterpret_cast<char*>(tv.data),
            static_cast<std::streamsize>(tv.size * sizeof(double)));
    if (!is) throw DataError("checkpoint: truncated tensor data: " + name);
  }
  return state;
}

}  // namespace trajlab::hier
