#include "core/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/crc64.hpp"
#include "core/error.hpp"

namespace medroute {

namespace {

constexpr char kMagic[4] = {'M', 'D', 'R', 'T'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::string& s, size_t& pos) {
  require(pos + 4 <= s.size(), ErrorKind::Checksum, "truncated checkpoint");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t((unsigned char)s[pos + size_t(i)]) << (8 * i);
  pos += 4;
  return v;
}

uint64_t get_u64(const std::string& s, size_t& pos) {
  require(pos + 8 <= s.size(), ErrorKind::Checksum, "truncated checkpoint");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t((unsigned char)s[pos + size_t(i)]) << (8 * i);
  pos += 8;
  return v;
}

void put_section(std::string& out, const std::string& data) {
  put_u64(out, data.size());
  out += data;
}

std::string get_section(const std::string& s, size_t& pos) {
  uint64_t len = get_u64(s, pos);
  require(pos + len <= s.size(), ErrorKind::Checksum, "truncated checkpoint");
  std::string data = s.substr(pos, len);
  pos += len;
  return data;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

nlohmann::json model_config_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"n_classes", c.n_classes},
          {"max_len", c.max_len},       {"d_model", c.d_model},
          {"n_heads", c.n_heads},       {"n_layers", c.n_layers},
          {"d_ff", c.d_ff},             {"dropout_rate", c.dropout_rate},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size");
  c.n_classes = j.at("n_classes");
  c.max_len = j.at("max_len");
  c.d_model = j.at("d_model");
  c.n_heads = j.at("n_heads");
  c.n_layers = j.at("n_layers");
  c.d_ff = j.at("d_ff");
  c.dropout_rate = j.at("dropout_rate");
  c.seed = j.at("seed");
  return c;
}

nlohmann::json train_config_json(const TrainConfig& c) {
  return {{"peak_lr", c.peak_lr},
          {"warmup_steps", c.warmup_steps},
          {"total_steps", c.total_steps},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"eps", c.eps},
          {"weight_decay", c.weight_decay},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"dropout_override", c.dropout_override}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.peak_lr = j.at("peak_lr");
  c.warmup_steps = j.at("warmup_steps");
  c.total_steps = j.at("total_steps");
  c.beta1 = j.at("beta1");
  c.beta2 = j.at("beta2");
  c.eps = j.at("eps");
  c.weight_decay = j.at("weight_decay");
  c.batch_size = j.at("batch_size");
  c.epochs = j.at("epochs");
  c.seed = j.at("seed");
  c.dropout_override = j.at("dropout_override");
  return c;
}

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

}  // namespace

void save_checkpoint(Checkpoint& ckpt, const std::string& path) {
  nlohmann::json meta;
  meta["model"] = model_config_json(ckpt.model_config);
  meta["train"] = train_config_json(ckpt.train_config);
  meta["history"] = nlohmann::json::array();
  for (const auto& e : ckpt.history)
    meta["history"].push_back({{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"val_macro_f1", e.val_macro_f1},
                               {"lr_last", e.lr_last}});
  meta["tensors"] = nlohmann::json::array();
  std::string blob;
  for (const auto& t : ckpt.params.tensors()) {
    meta["tensors"].push_back({{"name", t.name}, {"size", t.size}});
    size_t off = blob.size();
    blob.resize(off + t.size * sizeof(double));
    std::memcpy(blob.data() + off, t.data, t.size * sizeof(double));
  }

  std::string out(kMagic, 4);
  put_u32(out, Checkpoint::kFormatVersion);
  put_section(out, meta.dump());
  put_section(out, join_lines(ckpt.vocab.to_lines()));
  put_section(out, join_lines(ckpt.codec.labels()));
  put_section(out, blob);
  uint64_t crc = crc64(out.data(), out.size());
  put_u64(out, crc);
  ckpt.version_id = hex16(crc);

  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open for writing: " + path);
  f.write(out.data(), long(out.size()));
  require(f.good(), ErrorKind::Io, "write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::Io, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string s = ss.str();

  require(s.size() >= 16, ErrorKind::Checksum, "truncated checkpoint");
  require(std::memcmp(s.data(), kMagic, 4) == 0, ErrorKind::Version,
          "not a model checkpoint (bad magic)");
  uint64_t stored_crc = 0;
  {
    size_t pos = s.size() - 8;
    stored_crc = get_u64(s, pos);
  }
  uint64_t actual = crc64(s.data(), s.size() - 8);
  require(actual == stored_crc, ErrorKind::Checksum,
          "checkpoint checksum mismatch");

  size_t pos = 4;
  uint32_t version = get_u32(s, pos);
  require(version == Checkpoint::kFormatVersion, ErrorKind::Version,
          "unsupported checkpoint format version " + std::to_string(version));

  std::string body = s.substr(0, s.size() - 8);
  std::string meta_s = get_section(body, pos);
  std::string vocab_s = get_section(body, pos);
  std::string codec_s = get_section(body, pos);
  std::string blob = get_section(body, pos);

  nlohmann::json meta = nlohmann::json::parse(meta_s);
  Checkpoint ckpt;
  ckpt.model_config = model_config_from_json(meta.at("model"));
  ckpt.train_config = train_config_from_json(meta.at("train"));
  for (const auto& e : meta.at("history"))
    ckpt.history.push_back({e.at("epoch"), e.at("train_loss"),
                            e.at("val_macro_f1"), e.at("lr_last")});
  ckpt.vocab = Vocabulary::from_lines(split_lines(vocab_s));
  ckpt.codec = LabelCodec::from_labels(split_lines(codec_s));

  ckpt.params = ModelParams::zeros(ckpt.model_config);
  size_t off = 0, ti = 0;
  for (auto& t : ckpt.params.tensors()) {
    const auto& m = meta.at("tensors").at(ti++);
    require(m.at("name") == t.name && m.at("size") == t.size,
            ErrorKind::Schema, "tensor manifest mismatch at " + t.name);
    require(off + t.size * sizeof(double) <= blob.size(), ErrorKind::Checksum,
            "tensor blob shorter than manifest");
    std::memcpy(t.data, blob.data() + off, t.size * sizeof(double));
    off += t.size * sizeof(double);
  }
  require(off == blob.size(), ErrorKind::Schema,
          "tensor blob longer than manifest");
  ckpt.version_id = hex16(stored_crc);
  return ckpt;
}

std::string history_csv(const std::vector<EpochMetrics>& history) {
  std::string out = "epoch,train_loss,val_macro_f1,lr_last\n";
  char buf[128];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.8f\n", e.epoch,
                  e.train_loss, e.val_macro_f1, e.lr_last);
    out += buf;
  }
  return out;
}

}  // namespace medroute
