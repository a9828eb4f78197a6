#include "nncp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

constexpr char kMagic[8] = {'N', 'N', 'C', 'P', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t value) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes, 4);
}

void put_i32(std::ostream& out, std::int32_t value) {
  put_u32(out, static_cast<std::uint32_t>(value));
}

void put_f64(std::ostream& out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  char bytes[8];
  in.read(bytes, 8);
  if (in.gcount() != 8) {
    throw ParseError("checkpoint " + path + ": truncated");
  }
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i]))
             << (8 * i);
  }
  return value;
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  char bytes[4];
  in.read(bytes, 4);
  if (in.gcount() != 4) {
    throw ParseError("checkpoint " + path + ": truncated");
  }
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i]))
             << (8 * i);
  }
  return value;
}

std::int32_t get_i32(std::istream& in, const std::string& path) {
  return static_cast<std::int32_t>(get_u32(in, path));
}

double get_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64(in, path));
}

void put_matrix(std::ostream& out, const Matrix& m) {
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (double v : m.values()) put_f64(out, v);
}

Matrix get_matrix(std::istream& in, const std::string& path) {
  const std::uint64_t rows = get_u64(in, path);
  const std::uint64_t cols = get_u64(in, path);
  if (rows > (1u << 20) || cols > (1u << 20)) {
    throw ParseError("checkpoint " + path + ": implausible tensor shape");
  }
  Matrix m(rows, cols);
  for (double& v : m.values()) v = get_f64(in, path);
  return m;
}

}  // namespace

void save_checkpoint(const Seq2SeqModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_i32(out, model.config.k);
  put_i32(out, model.config.n);
  put_i32(out, model.config.hidden_dim);
  put_f64(out, model.config.dropout_rate);
  put_i32(out, model.config.epochs);
  put_f64(out, model.config.learning_rate);
  put_i32(out, model.config.batch_size);
  put_u64(out, model.config.seed);
  put_f64(out, model.config.rmsprop_rho);
  put_f64(out, model.config.rmsprop_epsilon);
  put_f64(out, model.config.clip_norm);
  for (const Matrix* m : model.params.tensors()) put_matrix(out, *m);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

Seq2SeqModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("checkpoint " + path + ": bad magic");
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion) {
    throw ParseError("checkpoint " + path + ": unsupported version " +
                     std::to_string(version));
  }
  Seq2SeqModel model;
  model.config.k = get_i32(in, path);
  model.config.n = get_i32(in, path);
  model.config.hidden_dim = get_i32(in, path);
  model.config.dropout_rate = get_f64(in, path);
  model.config.epochs = get_i32(in, path);
  model.config.learning_rate = get_f64(in, path);
  model.config.batch_size = get_i32(in, path);
  model.config.seed = get_u64(in, path);
  model.config.rmsprop_rho = get_f64(in, path);
  model.config.rmsprop_epsilon = get_f64(in, path);
  model.config.clip_norm = get_f64(in, path);
  for (Matrix* m : model.params.tensors()) *m = get_matrix(in, path);
  const auto h = static_cast<std::size_t>(model.config.hidden_dim);
  if (model.params.enc_w_rec.rows() != h ||
      model.params.enc_w_rec.cols() != h ||
      model.params.out_w.rows() != h || model.params.out_b.size() != 1) {
    throw ParseError("checkpoint " + path +
                     ": tensor shapes do not match hidden_dim");
  }
  return model;
}

}  // namespace nncp
