#include "lindrate/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace lindrate {

ModelParseError::ModelParseError(int line, std::string field, const std::string& message, bool invalid)
    : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + message),
      line_(line),
      field_(std::move(field)),
      invalid_(invalid) {}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) {
  throw ModelParseError(line_of(node), field, message);
}

[[noreturn]] void reject(const YAML::Node& node, const std::string& field, const std::string& message) {
  throw ModelParseError(line_of(node), field, message, true);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node || !node.IsScalar()) fail(node, field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, "cannot convert '" + node.Scalar() + "'");
  }
}

YAML::Node required(const YAML::Node& parent, const char* key, const std::string& field) {
  YAML::Node child = parent[key];
  if (!child) fail(parent, field, std::string("missing key '") + key + "'");
  return child;
}

cplx complex_entry(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) return scalar<double>(node, field);
  if (node.IsSequence() && node.size() == 2)
    return {scalar<double>(node[0], field), scalar<double>(node[1], field)};
  fail(node, field, "expected a number or [re, im]");
}

Matrix named_matrix(const YAML::Node& node, const std::string& name, int d, const std::string& field) {
  if (name == "identity") return ops::identity(d);
  if (name == "zero") return Matrix::Zero(d, d);
  static const std::map<std::string, Matrix (*)()> two_level = {
      {"sigma_minus", &ops::sigma_minus},         {"sigma_plus", &ops::sigma_plus},
      {"sigma_z", &ops::sigma_z},                 {"projector_excited", &ops::projector_excited},
      {"projector_ground", &ops::projector_ground}};
  const auto it = two_level.find(name);
  if (it == two_level.end()) fail(node, field, "unknown named operator '" + name + "'");
  if (d != 2) fail(node, field, "'" + name + "' is only defined for d = 2");
  return it->second();
}

Matrix matrix(const YAML::Node& node, int d, const std::string& field) {
  if (node.IsMap()) {
    Matrix m;
    if (node["named"]) {
      m = named_matrix(node["named"], scalar<std::string>(node["named"], field + ".named"), d, field);
    } else if (node["diag"]) {
      const YAML::Node diag = node["diag"];
      if (!diag.IsSequence() || static_cast<int>(diag.size()) != d) fail(diag, field + ".diag", "expected d entries");
      m = Matrix::Zero(d, d);
      for (int a = 0; a < d; ++a) m(a, a) = complex_entry(diag[a], field + ".diag");
    } else if (node["rows"]) {
      m = matrix(node["rows"], d, field + ".rows");
    } else {
      fail(node, field, "matrix map needs 'named', 'diag' or 'rows'");
    }
    if (node["scale"]) m *= complex_entry(node["scale"], field + ".scale");
    return m;
  }
  if (!node.IsSequence() || static_cast<int>(node.size()) != d) fail(node, field, "expected d rows");
  Matrix m(d, d);
  for (int r = 0; r < d; ++r) {
    const YAML::Node row = node[r];
    if (!row.IsSequence() || static_cast<int>(row.size()) != d) fail(row, field, "expected d entries per row");
    for (int c = 0; c < d; ++c) m(r, c) = complex_entry(row[c], field);
  }
  return m;
}

BlockOperator block_operator(const YAML::Node& parent, int n, int d, const std::string& field) {
  if (parent["all"]) return BlockOperator::uniform(n, matrix(parent["all"], d, field + ".all"));
  const YAML::Node blocks = required(parent, "blocks", field);
  if (!blocks.IsSequence() || static_cast<int>(blocks.size()) != n) fail(blocks, field + ".blocks", "expected n matrices");
  std::vector<Matrix> mats;
  for (int j = 0; j < n; ++j) mats.push_back(matrix(blocks[j], d, field + ".blocks[" + std::to_string(j + 1) + "]"));
  return BlockOperator(std::move(mats));
}

CouplingOperator coupling_operator(const YAML::Node& parent, int n, int d, const std::string& field) {
  CouplingOperator op(n, d);
  const YAML::Node entries = required(parent, "entries", field);
  if (!entries.IsSequence()) fail(entries, field + ".entries", "expected a list");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const YAML::Node entry = entries[e];
    const std::string ef = field + ".entries[" + std::to_string(e + 1) + "]";
    const int to = scalar<int>(required(entry, "to", ef), ef + ".to");
    const int from = scalar<int>(required(entry, "from", ef), ef + ".from");
    if (to < 1 || to > n || from < 1 || from > n) fail(entry, ef, "block index outside 1..n");
    op(to - 1, from - 1) += matrix(required(entry, "op", ef), d, ef + ".op");
  }
  return op;
}

enum class Kind { diffusive_diagonal, jump_diagonal, diffusive_coupling, jump_coupling };

Kind kind_of(const YAML::Node& node, const std::string& field) {
  const auto s = scalar<std::string>(node, field);
  if (s == "diffusive-diagonal") return Kind::diffusive_diagonal;
  if (s == "jump-diagonal") return Kind::jump_diagonal;
  if (s == "diffusive-coupling") return Kind::diffusive_coupling;
  if (s == "jump-coupling") return Kind::jump_coupling;
  fail(node, field, "unknown channel type '" + s + "'");
}

struct Pending {
  bool observed = false;
  int line = 0;
  std::string field;
};

// Observed channels must form a prefix of their group.
int observed_prefix(const std::vector<Pending>& group) {
  int count = 0;
  bool gap = false;
  for (const auto& p : group) {
    if (p.observed) {
      if (gap) throw ModelParseError(p.line, p.field, "observed channels must precede unobserved ones of the same type", true);
      ++count;
    } else {
      gap = true;
    }
  }
  return count;
}

}  // namespace

RateModel parse_model(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ModelParseError(e.mark.line + 1, "<document>", e.msg);
  }
  if (!root.IsMap()) throw ModelParseError(1, "<document>", "expected a mapping at top level");

  RateModel m;
  m.n = scalar<int>(required(root, "n", "n"), "n");
  m.d = scalar<int>(required(root, "d", "d"), "d");
  if (m.n <= 0) reject(root["n"], "n", "must be positive");
  if (m.d <= 0) reject(root["d"], "d", "must be positive");

  const YAML::Node ham = required(root, "hamiltonian", "hamiltonian");
  if (ham.IsMap() && ham["all"]) {
    m.hamiltonian = BlockOperator::uniform(m.n, matrix(ham["all"], m.d, "hamiltonian.all"));
  } else {
    if (!ham.IsSequence() || static_cast<int>(ham.size()) != m.n) fail(ham, "hamiltonian", "expected n matrices");
    std::vector<Matrix> blocks;
    for (int j = 0; j < m.n; ++j) blocks.push_back(matrix(ham[j], m.d, "hamiltonian[" + std::to_string(j + 1) + "]"));
    m.hamiltonian = BlockOperator(std::move(blocks));
  }
  if (!m.hamiltonian.is_hermitian(1e-12)) reject(ham, "hamiltonian", "blocks must be Hermitian");

  std::vector<DiagonalChannel> diff_diag, jump_diag;
  std::vector<CouplingChannel> diff_coup, jump_coup;
  std::vector<Pending> obs_diff_diag, obs_jump_diag, obs_jump_coup;

  const YAML::Node channels = root["channels"];
  if (channels && !channels.IsSequence()) fail(channels, "channels", "expected a list");
  for (std::size_t c = 0; channels && c < channels.size(); ++c) {
    const YAML::Node ch = channels[c];
    const std::string field = "channels[" + std::to_string(c + 1) + "]";
    if (!ch.IsMap()) fail(ch, field, "expected a mapping");
    const Kind kind = kind_of(required(ch, "type", field), field + ".type");
    const std::string name = ch["name"] ? scalar<std::string>(ch["name"], field + ".name") : std::string{};
    const bool observed = ch["observed"] ? scalar<bool>(ch["observed"], field + ".observed") : false;
    const Pending pending{observed, line_of(ch), field};

    if (kind == Kind::diffusive_diagonal || kind == Kind::jump_diagonal) {
      DiagonalChannel dc;
      dc.name = name;
      dc.base = block_operator(ch, m.n, m.d, field);
      if (const YAML::Node nu = ch["nu"]) {
        if (nu.IsSequence()) {
          if (static_cast<int>(nu.size()) != m.n) fail(nu, field + ".nu", "expected one frequency per block");
          for (int j = 0; j < m.n; ++j) dc.phase.push_back(heterodyne_phase(scalar<double>(nu[j], field + ".nu")));
        } else {
          dc.phase.assign(static_cast<std::size_t>(m.n), heterodyne_phase(scalar<double>(nu, field + ".nu")));
        }
      }
      if (kind == Kind::jump_diagonal) {
        dc.intensity = scalar<double>(required(ch, "intensity", field), field + ".intensity");
        if (!(dc.intensity > 0.0)) reject(ch["intensity"], field + ".intensity", "must be positive");
        jump_diag.push_back(std::move(dc));
        obs_jump_diag.push_back(pending);
      } else {
        diff_diag.push_back(std::move(dc));
        obs_diff_diag.push_back(pending);
      }
    } else {
      CouplingChannel cc;
      cc.name = name;
      cc.op = coupling_operator(ch, m.n, m.d, field);
      if (kind == Kind::jump_coupling) {
        const YAML::Node lam = required(ch, "intensities", field);
        if (!lam.IsSequence() || static_cast<int>(lam.size()) != m.n)
          fail(lam, field + ".intensities", "expected one intensity per source block");
        for (int k = 0; k < m.n; ++k) {
          const double l = scalar<double>(lam[k], field + ".intensities");
          if (l < 0.0) reject(lam[k], field + ".intensities", "must be non-negative");
          if (l == 0.0 && !cc.op.column_is_zero(k))
            reject(lam[k], field + ".intensities", "zero intensity needs a zero operator column");
          cc.intensity.push_back(l);
        }
        jump_coup.push_back(std::move(cc));
        obs_jump_coup.push_back(pending);
      } else {
        if (observed) reject(ch["observed"], field + ".observed", "diffusive coupling noises cannot be observed");
        diff_coup.push_back(std::move(cc));
      }
    }
  }

  m.d1 = static_cast<int>(diff_diag.size());
  m.d2 = static_cast<int>(diff_coup.size());
  m.diagonal = std::move(diff_diag);
  m.diagonal.insert(m.diagonal.end(), jump_diag.begin(), jump_diag.end());
  m.coupling = std::move(diff_coup);
  m.coupling.insert(m.coupling.end(), jump_coup.begin(), jump_coup.end());
  m.observed.d1 = observed_prefix(obs_diff_diag);
  m.observed.m1 = m.d1 + observed_prefix(obs_jump_diag);
  m.observed.m2 = m.d2 + observed_prefix(obs_jump_coup);
  return m;
}

RateModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError(0, path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace lindrate
