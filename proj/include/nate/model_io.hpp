#pragma once

// Versioned binary model files.  Layout (all little-endian):
//
//   magic   "NATE1" (5 bytes)
//   kind    u8   (1 linear, 2 tree, 3 forest, 4 mlp)
//   schema  u32 length + bytes  (feature schema version string)
//   mask    u32 count + i32[count]  (active feature indices)
//   payload per kind (standardizer first, then parameters; see write_*)
//
// load(save(m)) evaluates bit-identically: doubles round-trip through their
// IEEE-754 bit patterns.  Truncated or over-long input raises CorruptModel;
// a bad magic or unknown schema version raises VersionMismatch.

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "nate/model_forest.hpp"
#include "nate/model_linear.hpp"
#include "nate/model_mlp.hpp"

namespace nate {

enum class ModelKind : uint8_t { Linear = 1, Tree = 2, Forest = 3, Mlp = 4 };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Tree: return "tree";
    case ModelKind::Forest: return "forest";
    case ModelKind::Mlp: return "mlp";
  }
  return "?";
}

struct AnyModel {
  ModelKind kind = ModelKind::Linear;
  std::string schema_version;
  FeatureMask mask;
  LogisticModel linear;
  DecisionTreeModel tree;
  RandomForestModel forest;
  MlpModel mlp;

  // Confidence on an already mask-applied vector.
  double eval(const std::vector<double>& v) const {
    switch (kind) {
      case ModelKind::Linear: return eval_logistic(linear, v);
      case ModelKind::Tree: return eval_tree(tree, v);
      case ModelKind::Forest: return eval_forest(forest, v);
      case ModelKind::Mlp: return eval_mlp(mlp, v);
    }
    return 0.0;
  }

  // Confidence on a full schema-width vector.
  double eval_full(const std::vector<double>& full) const {
    return eval(mask.apply(full));
  }
};

namespace detail {

struct ByteWriter {
  std::string out;
  void u8(uint8_t v) { out.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    out += s;
  }
};

struct ByteReader {
  const std::string& in;
  size_t at = 0;
  uint8_t u8() {
    if (at >= in.size()) throw CorruptModelError("truncated");
    return static_cast<uint8_t>(in[at++]);
  }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    uint32_t n = u32();
    if (at + n > in.size()) throw CorruptModelError("truncated");
    std::string s = in.substr(at, n);
    at += n;
    return s;
  }
};

inline void write_standardizer(ByteWriter& w, const Standardizer& s) {
  w.u32(static_cast<uint32_t>(s.columns.size()));
  for (size_t i = 0; i < s.columns.size(); ++i) {
    w.i32(s.columns[i]);
    w.f64(s.mean[i]);
    w.f64(s.sd[i]);
  }
}

inline Standardizer read_standardizer(ByteReader& r) {
  Standardizer s;
  uint32_t n = r.u32();
  for (uint32_t i = 0; i < n; ++i) {
    s.columns.push_back(r.i32());
    s.mean.push_back(r.f64());
    s.sd.push_back(r.f64());
  }
  return s;
}

inline void write_tree_nodes(ByteWriter& w,
                             const std::vector<TreeNode>& nodes) {
  w.u32(static_cast<uint32_t>(nodes.size()));
  for (const auto& n : nodes) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.f64(n.p_true);
    w.u32(n.count);
  }
}

inline std::vector<TreeNode> read_tree_nodes(ByteReader& r) {
  uint32_t n = r.u32();
  std::vector<TreeNode> nodes(n);
  for (auto& node : nodes) {
    node.feature = r.i32();
    node.threshold = r.f64();
    node.left = r.i32();
    node.right = r.i32();
    node.p_true = r.f64();
    node.count = r.u32();
  }
  return nodes;
}

}  // namespace detail

inline std::string save_model(const AnyModel& m) {
  detail::ByteWriter w;
  w.out += "NATE1";
  w.u8(static_cast<uint8_t>(m.kind));
  w.str(m.schema_version);
  w.u32(static_cast<uint32_t>(m.mask.active.size()));
  for (int i : m.mask.active) w.i32(i);
  switch (m.kind) {
    case ModelKind::Linear: {
      detail::write_standardizer(w, m.linear.standardizer);
      w.u32(static_cast<uint32_t>(m.linear.weights.size()));
      for (double v : m.linear.weights) w.f64(v);
      w.f64(m.linear.bias);
      break;
    }
    case ModelKind::Tree: {
      detail::write_standardizer(w, m.tree.standardizer);
      detail::write_tree_nodes(w, m.tree.nodes);
      break;
    }
    case ModelKind::Forest: {
      w.u32(static_cast<uint32_t>(m.forest.trees.size()));
      for (uint64_t s : m.forest.seeds) w.u64(s);
      for (const auto& t : m.forest.trees) {
        detail::write_standardizer(w, t.standardizer);
        detail::write_tree_nodes(w, t.nodes);
      }
      break;
    }
    case ModelKind::Mlp: {
      detail::write_standardizer(w, m.mlp.standardizer);
      w.u32(static_cast<uint32_t>(m.mlp.input));
      w.u32(static_cast<uint32_t>(m.mlp.hidden));
      for (double v : m.mlp.w1) w.f64(v);
      for (double v : m.mlp.b1) w.f64(v);
      for (double v : m.mlp.w2) w.f64(v);
      w.f64(m.mlp.b2);
      break;
    }
  }
  return std::move(w.out);
}

inline AnyModel load_model(const std::string& bytes) {
  if (bytes.size() < 5 || bytes.substr(0, 5) != "NATE1")
    throw VersionMismatchError("bad magic");
  detail::ByteReader r{bytes, 5};
  AnyModel m;
  uint8_t kind = r.u8();
  if (kind < 1 || kind > 4) throw CorruptModelError("unknown model kind");
  m.kind = static_cast<ModelKind>(kind);
  m.schema_version = r.str();
  if (m.schema_version != schema().version)
    throw VersionMismatchError("schema " + m.schema_version +
                               " != " + schema().version);
  uint32_t mask_n = r.u32();
  for (uint32_t i = 0; i < mask_n; ++i) {
    int idx = r.i32();
    if (idx < 0 || idx >= schema().width())
      throw CorruptModelError("feature index out of range");
    m.mask.active.push_back(idx);
  }
  switch (m.kind) {
    case ModelKind::Linear: {
      m.linear.standardizer = detail::read_standardizer(r);
      uint32_t d = r.u32();
      for (uint32_t i = 0; i < d; ++i) m.linear.weights.push_back(r.f64());
      m.linear.bias = r.f64();
      break;
    }
    case ModelKind::Tree: {
      m.tree.standardizer = detail::read_standardizer(r);
      m.tree.nodes = detail::read_tree_nodes(r);
      break;
    }
    case ModelKind::Forest: {
      uint32_t n = r.u32();
      for (uint32_t i = 0; i < n; ++i) m.forest.seeds.push_back(r.u64());
      for (uint32_t i = 0; i < n; ++i) {
        DecisionTreeModel t;
        t.standardizer = detail::read_standardizer(r);
        t.nodes = detail::read_tree_nodes(r);
        m.forest.trees.push_back(std::move(t));
      }
      break;
    }
    case ModelKind::Mlp: {
      m.mlp.standardizer = detail::read_standardizer(r);
      m.mlp.input = static_cast<int>(r.u32());
      m.mlp.hidden = static_cast<int>(r.u32());
      size_t n1 = static_cast<size_t>(m.mlp.input) * m.mlp.hidden;
      for (size_t i = 0; i < n1; ++i) m.mlp.w1.push_back(r.f64());
      for (int i = 0; i < m.mlp.hidden; ++i) m.mlp.b1.push_back(r.f64());
      for (int i = 0; i < m.mlp.hidden; ++i) m.mlp.w2.push_back(r.f64());
      m.mlp.b2 = r.f64();
      break;
    }
  }
  if (r.at != bytes.size()) throw CorruptModelError("trailing bytes");
  return m;
}

inline void save_model_file(const AnyModel& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CorruptModelError("cannot open " + path + " for writing");
  std::string bytes = save_model(m);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline AnyModel load_model_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptModelError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return load_model(bytes);
}

}  // namespace nate
