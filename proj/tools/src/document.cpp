#include "akit/cli/document.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

namespace akit::cli {

DocumentError::DocumentError(std::string file, int line, int column, std::string message)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      file_(std::move(file)),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

const char* kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::algebroid: return "algebroid";
    case BlockKind::liealg: return "liealg";
    case BlockKind::map: return "map";
    case BlockKind::homotopy: return "homotopy";
    case BlockKind::path: return "path";
    case BlockKind::retraction: return "retraction";
  }
  return "?";
}

namespace {

std::optional<BlockKind> kind_from(std::string_view s) {
  for (BlockKind k : {BlockKind::algebroid, BlockKind::liealg, BlockKind::map, BlockKind::homotopy, BlockKind::path,
                      BlockKind::retraction}) {
    if (s == kind_name(k)) return k;
  }
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

struct Entry {
  std::string key;
  std::string value;
  int line;
  int key_column;
  int value_column;
};

struct RawBlock {
  BlockKind kind;
  std::string name;
  int line;
  int column;
  std::vector<Entry> entries;
};

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// "name[i][j]" with 1-based indices; returns the 0-based indices.
std::optional<std::vector<int>> indexed_key(std::string_view key, std::string_view prefix) {
  if (key.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string_view rest = key.substr(prefix.size());
  if (rest.empty()) return std::nullopt;
  std::vector<int> out;
  while (!rest.empty()) {
    if (rest.front() != '[') return std::nullopt;
    const auto close = rest.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    const std::string_view digits = trim(rest.substr(1, close - 1));
    int v = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
    out.push_back(v - 1);
    rest.remove_prefix(close + 1);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(int line, int column, const std::string& message) const {
    throw DocumentError(file_, line, column, message);
  }
  [[noreturn]] void fail(const Entry& e, const std::string& message) const { fail(e.line, e.value_column, message); }
  [[noreturn]] void fail_key(const Entry& e, const std::string& message) const {
    fail(e.line, e.key_column, message);
  }

  std::vector<RawBlock> split(std::string_view text) const {
    std::vector<RawBlock> blocks;
    std::set<std::string, std::less<>> names;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const std::string_view body = trim(line);
      if (body.empty()) {
        if (eol == text.size()) break;
        continue;
      }
      const int first_col = static_cast<int>(body.data() - line.data()) + 1;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        if (body.front() != '[' || body.back() != ']') {
          fail(line_no, first_col, "expected '[kind name]' or 'key = value'");
        }
        const auto words = split_words(body.substr(1, body.size() - 2));
        if (words.size() != 2) fail(line_no, first_col, "block header must be '[kind name]'");
        const auto kind = kind_from(words[0]);
        if (!kind) fail(line_no, first_col + 1, "unknown block kind '" + words[0] + "'");
        if (!is_identifier(words[1]) && words[1].find_first_not_of(
                                            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") !=
                                            std::string::npos) {
          fail(line_no, first_col, "invalid block name '" + words[1] + "'");
        }
        if (!names.insert(words[1]).second) fail(line_no, first_col, "duplicate block name '" + words[1] + "'");
        blocks.push_back(RawBlock{*kind, words[1], line_no, first_col, {}});
      } else {
        if (blocks.empty()) fail(line_no, first_col, "entry outside of any block");
        const std::string_view key = trim(body.substr(0, eq));
        const std::string_view raw_value = body.substr(eq + 1);
        const std::string_view value = trim(raw_value);
        if (key.empty()) fail(line_no, first_col, "missing key before '='");
        int value_col = static_cast<int>(raw_value.data() - line.data()) + 1;
        if (!value.empty()) value_col = static_cast<int>(value.data() - line.data()) + 1;
        // Keys compare with internal whitespace removed, so "[e1, e2]" and "[e1,e2]" coincide.
        std::string norm;
        for (char c : key) {
          if (!std::isspace(static_cast<unsigned char>(c))) norm += c;
        }
        RawBlock& b = blocks.back();
        for (const auto& e : b.entries) {
          if (e.key == norm) fail(line_no, first_col, "duplicate key '" + norm + "' in block '" + b.name + "'");
        }
        b.entries.push_back(Entry{norm, std::string(value), line_no, first_col, value_col});
      }
      if (eol == text.size()) break;
    }
    return blocks;
  }

  Polynomial poly(const Entry& e, std::string_view text, int offset, const Ring& ring) const {
    try {
      return parse_poly(text, ring);
    } catch (const ParseError& err) {
      fail(e.line, e.value_column + offset + static_cast<int>(err.offset()), err.what());
    } catch (const PolynomialError& err) {
      fail(e.line, e.value_column + offset, err.what());
    }
  }
  Polynomial poly(const Entry& e, const Ring& ring) const { return poly(e, e.value, 0, ring); }

  Rational rational(const Entry& e, std::string_view text, int offset) const {
    try {
      return parse_rational(text);
    } catch (const std::exception&) {
      fail(e.line, e.value_column + offset, "expected a rational number, got '" + std::string(text) + "'");
    }
  }

  int integer(const Entry& e) const {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size()) fail(e, "expected an integer");
    return v;
  }

  /// Comma-separated pieces of a value with their offsets.
  static std::vector<std::pair<std::string_view, int>> pieces(std::string_view value, char sep) {
    std::vector<std::pair<std::string_view, int>> out;
    std::size_t start = 0;
    while (true) {
      const auto end = value.find(sep, start);
      const std::string_view raw = value.substr(start, end == std::string_view::npos ? end : end - start);
      const std::string_view t = trim(raw);
      out.emplace_back(t, static_cast<int>(t.empty() ? start : t.data() - value.data()));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    return out;
  }

  RationalMatrix matrix(const Entry& e, int rows, int cols) const {
    RationalMatrix m;
    const std::string_view value = e.value;
    for (const auto& [row_text, row_offset] : pieces(value, ';')) {
      std::vector<Rational> row;
      std::size_t i = 0;
      while (i < row_text.size()) {
        while (i < row_text.size() && (std::isspace(static_cast<unsigned char>(row_text[i])) || row_text[i] == ',')) {
          ++i;
        }
        if (i >= row_text.size()) break;
        std::size_t j = i;
        while (j < row_text.size() && !std::isspace(static_cast<unsigned char>(row_text[j])) && row_text[j] != ',') {
          ++j;
        }
        row.push_back(rational(e, row_text.substr(i, j - i), row_offset + static_cast<int>(i)));
        i = j;
      }
      if (static_cast<int>(row.size()) != cols) {
        fail(e.line, e.value_column + row_offset,
             "matrix row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
      }
      m.push_back(std::move(row));
    }
    if (static_cast<int>(m.size()) != rows) {
      fail(e, "matrix has " + std::to_string(m.size()) + " rows, expected " + std::to_string(rows));
    }
    return m;
  }

  /// Σ_c p_c e_c, parsed in the ring extended by e1..er.
  std::vector<Polynomial> combination(const Entry& e, const Ring& ring, int rank) const {
    std::vector<std::string> names(ring.names().begin(), ring.names().end());
    for (int c = 0; c < rank; ++c) names.push_back("e" + std::to_string(c + 1));
    const Ring extended(names);
    const Polynomial p = poly(e, extended);
    std::vector<Polynomial> out(rank, Polynomial(ring));
    const std::size_t base = ring.size();
    for (const auto& [exp, coeff] : p.terms()) {
      int which = -1;
      int count = 0;
      for (int c = 0; c < rank; ++c) {
        count += exp[base + c];
        if (exp[base + c] > 0) which = c;
      }
      if (count != 1) fail(e, "bracket value must be linear in e1..e" + std::to_string(rank));
      Exponent reduced(exp.begin(), exp.begin() + static_cast<std::ptrdiff_t>(base));
      out[which] += Polynomial::monomial(ring, reduced, coeff);
    }
    return out;
  }

  const Entry* find(const RawBlock& b, std::string_view key) const {
    for (const auto& e : b.entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }
  const Entry& require(const RawBlock& b, std::string_view key) const {
    const Entry* e = find(b, key);
    if (!e) fail(b.line, b.column, std::string(kind_name(b.kind)) + " '" + b.name + "' needs '" + std::string(key) + "'");
    return *e;
  }

 private:
  std::string file_;
};

int index_in(const std::vector<std::string>& names, std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

std::vector<Polynomial> time_derivative(const std::vector<Polynomial>& phi) {
  std::vector<Polynomial> out;
  for (const auto& p : phi) out.push_back(p.diff(kTimeVariable));
  return out;
}

}  // namespace

class DocumentBuilder {
 public:
  DocumentBuilder(Parser& parser, Document& doc) : p_(parser), doc_(doc) {}

  void run(std::vector<RawBlock> blocks) {
    for (const auto& b : blocks) doc_.order_.push_back(BlockRef{b.kind, b.name, b.line});
    for (BlockKind kind : {BlockKind::algebroid, BlockKind::liealg, BlockKind::map, BlockKind::homotopy,
                           BlockKind::path, BlockKind::retraction}) {
      for (const auto& b : blocks) {
        if (b.kind == kind) build(b);
      }
    }
  }

 private:
  void build(const RawBlock& b) {
    try {
      switch (b.kind) {
        case BlockKind::algebroid: algebroid(b); break;
        case BlockKind::liealg: liealg(b); break;
        case BlockKind::map: map(b); break;
        case BlockKind::homotopy: homotopy(b); break;
        case BlockKind::path: path(b); break;
        case BlockKind::retraction: retraction(b); break;
      }
    } catch (const DocumentError&) {
      throw;
    } catch (const std::exception& err) {
      p_.fail(b.line, b.column, std::string(kind_name(b.kind)) + " '" + b.name + "': " + err.what());
    }
  }

  void unknown_keys(const RawBlock& b, const std::function<bool(const Entry&)>& known) {
    for (const auto& e : b.entries) {
      if (!known(e)) p_.fail_key(e, "unknown key '" + e.key + "' in " + kind_name(b.kind) + " block");
    }
  }

  AlgebroidPtr resolve_algebroid(const Entry& e) {
    const auto it = doc_.algebroids_.find(e.value);
    if (it == doc_.algebroids_.end()) p_.fail(e, "undefined algebroid '" + e.value + "'");
    return it->second;
  }

  void algebroid(const RawBlock& b) {
    std::vector<std::string> coords;
    if (const Entry* e = p_.find(b, "coords")) {
      coords = split_words(e->value);
      std::set<std::string> seen;
      for (const auto& c : coords) {
        if (!is_identifier(c)) p_.fail(*e, "invalid coordinate name '" + c + "'");
        if (c == kTimeVariable) p_.fail(*e, "'t' is reserved for time");
        if (std::regex_match(c, std::regex("e[0-9]*"))) p_.fail(*e, "coordinate names e, e1, e2, ... are reserved");
        if (!seen.insert(c).second) p_.fail(*e, "duplicate coordinate '" + c + "'");
      }
    }
    const Entry* anchor_all = p_.find(b, "anchor");
    if (anchor_all && anchor_all->value != "identity") p_.fail(*anchor_all, "expected 'identity' or anchor[a] rows");
    int rank = 0;
    if (const Entry* e = p_.find(b, "rank")) {
      rank = p_.integer(*e);
      if (rank < 0) p_.fail(*e, "rank must be non-negative");
    } else if (anchor_all) {
      rank = static_cast<int>(coords.size());
    } else {
      p_.require(b, "rank");
    }
    const int m = static_cast<int>(coords.size());
    if (anchor_all && rank != m) p_.fail(*anchor_all, "identity anchor needs rank = number of coordinates");

    LieAlgebroid::Builder builder(b.name, coords, rank);
    const Ring& ring = builder.ring();
    if (anchor_all) {
      for (int a = 0; a < rank; ++a) builder.anchor(a, a, Polynomial::constant(ring, 1));
    }
    static const std::regex bracket_key(R"(\[e([0-9]+),e([0-9]+)\])");
    for (const auto& e : b.entries) {
      std::smatch match;
      if (std::regex_match(e.key, match, bracket_key)) {
        const int a = std::stoi(match[1]) - 1;
        const int c = std::stoi(match[2]) - 1;
        if (a < 0 || c < 0 || a >= rank || c >= rank) p_.fail_key(e, "frame index out of range");
        if (a == c) p_.fail_key(e, "[e_a, e_a] is always zero");
        builder.bracket(a, c, p_.combination(e, ring, rank));
      } else if (const auto idx = indexed_key(e.key, "anchor")) {
        if (anchor_all) p_.fail_key(e, "anchor rows conflict with 'anchor = identity'");
        if (idx->size() != 1 || (*idx)[0] < 0 || (*idx)[0] >= rank) p_.fail_key(e, "frame index out of range");
        const auto parts = Parser::pieces(e.value, ',');
        if (static_cast<int>(parts.size()) != m) {
          p_.fail(e, "anchor row has " + std::to_string(parts.size()) + " entries, expected " + std::to_string(m));
        }
        for (int i = 0; i < m; ++i) builder.anchor((*idx)[0], i, p_.poly(e, parts[i].first, parts[i].second, ring));
      } else if (e.key != "coords" && e.key != "rank" && e.key != "anchor") {
        p_.fail_key(e, "unknown key '" + e.key + "' in algebroid block");
      }
    }
    doc_.algebroids_.emplace(b.name, std::make_shared<const LieAlgebroid>(std::move(builder).build()));
  }

  void liealg(const RawBlock& b) {
    const int n = p_.integer(p_.require(b, "n"));
    if (n <= 0) p_.fail(p_.require(b, "n"), "matrix size must be positive");
    std::map<int, const Entry*> rows;
    for (const auto& e : b.entries) {
      if (e.key == "n") continue;
      const auto idx = indexed_key(e.key, "basis");
      if (!idx || idx->size() != 1 || (*idx)[0] < 0) p_.fail_key(e, "unknown key '" + e.key + "' in liealg block");
      rows[(*idx)[0]] = &e;
    }
    std::vector<RationalMatrix> basis;
    for (const auto& [a, e] : rows) {
      if (a != static_cast<int>(basis.size())) p_.fail_key(*e, "basis indices must be 1, 2, ... without gaps");
      basis.push_back(p_.matrix(*e, n, n));
    }
    auto algebra = std::make_shared<const MatrixLieAlgebra>(b.name, n, std::move(basis));
    doc_.algebroids_.emplace(b.name, algebra->algebroid());
    doc_.liealgs_.emplace(b.name, std::move(algebra));
  }

  void map(const RawBlock& b) {
    const AlgebroidPtr source = resolve_algebroid(p_.require(b, "source"));
    const AlgebroidPtr target = resolve_algebroid(p_.require(b, "target"));
    const Ring& ring = source->ring();
    const Entry* mode = p_.find(b, "Phi");
    if (mode && mode->value != "identity" && mode->value != "jacobian") {
      p_.fail(*mode, "expected 'identity' or 'jacobian'");
    }
    const int n = target->base_dim();
    std::vector<std::optional<Polynomial>> base(n);
    PolyMatrix fiber(target->rank(), std::vector<Polynomial>(source->rank(), Polynomial(ring)));
    std::vector<const Entry*> explicit_entries;
    for (const auto& e : b.entries) {
      if (e.key == "source" || e.key == "target" || e.key == "Phi") continue;
      if (const int j = index_in(target->coordinates(), e.key); j >= 0) {
        base[j] = p_.poly(e, ring);
      } else if (const auto idx = indexed_key(e.key, "Phi")) {
        if (idx->size() != 2 || (*idx)[0] < 0 || (*idx)[0] >= target->rank() || (*idx)[1] < 0 ||
            (*idx)[1] >= source->rank()) {
          p_.fail_key(e, "Phi[b][a] needs 1 <= b <= " + std::to_string(target->rank()) + " and 1 <= a <= " +
                             std::to_string(source->rank()));
        }
        explicit_entries.push_back(&e);
      } else {
        p_.fail_key(e, "unknown key '" + e.key + "' in map block");
      }
    }
    const bool identity = mode && mode->value == "identity";
    if (identity) {
      if (source != target) p_.fail(*mode, "identity needs source = target");
      for (int i = 0; i < n; ++i) {
        if (!base[i]) base[i] = source->coordinate(i);
      }
      for (int a = 0; a < source->rank(); ++a) fiber[a][a] = source->constant(1);
    }
    std::vector<Polynomial> phi;
    for (int j = 0; j < n; ++j) {
      if (!base[j]) p_.fail(b.line, b.column, "map '" + b.name + "' is missing base component " + target->coordinates()[j]);
      phi.push_back(*base[j]);
    }
    if (mode && mode->value == "jacobian") {
      if (source->rank() != source->base_dim() || target->rank() != n) {
        p_.fail(*mode, "jacobian needs rank = number of coordinates on both sides");
      }
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < source->base_dim(); ++i) fiber[j][i] = phi[j].diff(source->coordinates()[i]);
      }
    }
    for (const Entry* e : explicit_entries) {
      const auto idx = *indexed_key(e->key, "Phi");
      fiber[idx[0]][idx[1]] = p_.poly(*e, ring);
    }
    doc_.maps_.emplace(b.name, BundleMap(source, target, std::move(phi), std::move(fiber), b.name));
  }

  const BundleMap& resolve_map(const Entry& e) {
    const auto it = doc_.maps_.find(e.value);
    if (it == doc_.maps_.end()) p_.fail(e, "undefined map '" + e.value + "'");
    return it->second;
  }

  std::vector<Polynomial> theta_values(const BundleMap& family, const std::map<int, const Entry*>& entries,
                                       const Entry* derivative) {
    const AlgebroidPtr& target = family.target();
    if (derivative) {
      if (derivative->value != "d/dt") p_.fail(*derivative, "expected 'd/dt' or theta components");
      if (!entries.empty()) p_.fail(*derivative, "theta = d/dt conflicts with explicit components");
      if (target->rank() != target->base_dim()) p_.fail(*derivative, "theta = d/dt needs a tangent target");
      return time_derivative(family.base_map());
    }
    std::vector<Polynomial> theta(target->rank(), family.source()->zero());
    for (const auto& [bidx, e] : entries) {
      if (bidx < 0 || bidx >= target->rank()) p_.fail_key(*e, "theta index out of range");
      theta[bidx] = p_.poly(*e, family.source()->ring());
    }
    return theta;
  }

  void homotopy(const RawBlock& b) {
    bool piecewise = false;
    for (const auto& e : b.entries) piecewise |= indexed_key(e.key, "interval").has_value();
    if (!piecewise) {
      const BundleMap& family = resolve_map(p_.require(b, "map"));
      std::map<int, const Entry*> theta;
      for (const auto& e : b.entries) {
        if (e.key == "map" || e.key == "theta") continue;
        const auto idx = indexed_key(e.key, "theta");
        if (!idx || idx->size() != 1) p_.fail_key(e, "unknown key '" + e.key + "' in homotopy block");
        theta[(*idx)[0]] = &e;
      }
      doc_.homotopies_.emplace(
          b.name, NaturalHomotopy::smooth(family, theta_values(family, theta, p_.find(b, "theta")), b.name));
      return;
    }
    struct Spec {
      const Entry* interval = nullptr;
      const Entry* map = nullptr;
      const Entry* derivative = nullptr;
      std::map<int, const Entry*> theta;
    };
    std::map<int, Spec> specs;
    for (const auto& e : b.entries) {
      if (const auto i = indexed_key(e.key, "interval"); i && i->size() == 1) {
        specs[(*i)[0]].interval = &e;
      } else if (const auto m = indexed_key(e.key, "map"); m && m->size() == 1) {
        specs[(*m)[0]].map = &e;
      } else if (const auto t = indexed_key(e.key, "theta"); t && t->size() == 1) {
        specs[(*t)[0]].derivative = &e;
      } else if (t && t->size() == 2) {
        specs[(*t)[0]].theta[(*t)[1]] = &e;
      } else {
        p_.fail_key(e, "unknown key '" + e.key + "' in piecewise homotopy block (use interval[p], map[p], theta[p][b])");
      }
    }
    std::vector<HomotopyPiece> pieces;
    for (const auto& [index, spec] : specs) {
      if (!spec.interval || !spec.map) {
        p_.fail(b.line, b.column, "piece " + std::to_string(index + 1) + " needs interval[p] and map[p]");
      }
      const auto ends = Parser::pieces(spec.interval->value, ',');
      if (ends.size() != 2) p_.fail(*spec.interval, "interval must be 'start, end'");
      const Rational start = p_.rational(*spec.interval, ends[0].first, ends[0].second);
      const Rational end = p_.rational(*spec.interval, ends[1].first, ends[1].second);
      const BundleMap& family = resolve_map(*spec.map);
      std::vector<Polynomial> theta = theta_values(family, spec.theta, spec.derivative);
      pieces.push_back(HomotopyPiece{start, end, family, SupportedSection(family, std::move(theta))});
    }
    doc_.homotopies_.emplace(b.name, NaturalHomotopy(std::move(pieces), b.name));
  }

  RationalMatrix identity(int r) {
    RationalMatrix m(r, std::vector<Rational>(r, Rational(0)));
    for (int i = 0; i < r; ++i) m[i][i] = 1;
    return m;
  }

  void path(const RawBlock& b) {
    const Entry& algebra_entry = p_.require(b, "algebra");
    const auto it = doc_.liealgs_.find(algebra_entry.value);
    if (it == doc_.liealgs_.end()) p_.fail(algebra_entry, "undefined liealg '" + algebra_entry.value + "'");
    const MatrixLieAlgebra& g = *it->second;
    const int r = g.rank();
    const Ring ring({std::string(kTimeVariable)});
    PathDefinition def{g.name(), std::vector<Polynomial>(r, Polynomial(ring)), identity(r), std::nullopt};
    for (const auto& e : b.entries) {
      if (e.key == "algebra") continue;
      if (e.key == "phi0" || e.key == "phi1") {
        RationalMatrix m = e.value == "identity" ? identity(r) : p_.matrix(e, r, r);
        (e.key == "phi0" ? def.phi0 : def.phi1.emplace()) = std::move(m);
      } else if (const auto idx = indexed_key(e.key, "theta"); idx && idx->size() == 1) {
        if ((*idx)[0] < 0 || (*idx)[0] >= r) p_.fail_key(e, "theta index out of range for rank " + std::to_string(r));
        def.theta[(*idx)[0]] = p_.poly(e, ring);
      } else {
        p_.fail_key(e, "unknown key '" + e.key + "' in path block");
      }
    }
    doc_.paths_.emplace(b.name, std::move(def));
  }

  void retraction(const RawBlock& b) {
    const Entry& h_entry = p_.require(b, "homotopy");
    const auto it = doc_.homotopies_.find(h_entry.value);
    if (it == doc_.homotopies_.end()) p_.fail(h_entry, "undefined homotopy '" + h_entry.value + "'");
    const AlgebroidPtr& ambient = it->second.source();
    RetractionDefinition def{h_entry.value, {}, {}, {}};

    const Entry& r_entry = p_.require(b, "R");
    const auto r_words = split_words(r_entry.value);
    if (r_words.empty() || r_words.front() != "zero") p_.fail(r_entry, "expected 'zero <coordinates...>'");
    for (std::size_t i = 1; i < r_words.size(); ++i) {
      const int j = index_in(ambient->coordinates(), r_words[i]);
      if (j < 0) p_.fail(r_entry, "'" + r_words[i] + "' is not a coordinate of " + ambient->name());
      def.dropped.push_back(j);
    }
    const Entry& ar_entry = p_.require(b, "AR");
    const auto ar_words = split_words(ar_entry.value);
    if (ar_words.empty() || ar_words.front() != "span") p_.fail(ar_entry, "expected 'span <frame elements...>'");
    for (std::size_t i = 1; i < ar_words.size(); ++i) {
      std::smatch match;
      static const std::regex frame(R"(e([0-9]+))");
      if (!std::regex_match(ar_words[i], match, frame)) p_.fail(ar_entry, "expected e1, e2, ...");
      const int a = std::stoi(match[1]) - 1;
      if (a < 0 || a >= ambient->rank()) p_.fail(ar_entry, "frame element '" + ar_words[i] + "' out of range");
      def.kept_frame.push_back(a);
    }
    if (const Entry* s = p_.find(b, "samples")) {
      const std::string_view v = s->value;
      std::size_t i = 0;
      while (i < v.size()) {
        if (std::isspace(static_cast<unsigned char>(v[i]))) {
          ++i;
          continue;
        }
        if (v[i] != '(') p_.fail(s->line, s->value_column + static_cast<int>(i), "expected '(' to open a sample");
        const auto close = v.find(')', i);
        if (close == std::string_view::npos) p_.fail(s->line, s->value_column + static_cast<int>(i), "unclosed '('");
        std::vector<Rational> point;
        const std::string_view inner = v.substr(i + 1, close - i - 1);
        if (!trim(inner).empty()) {
          for (const auto& [text, off] : Parser::pieces(inner, ',')) {
            point.push_back(p_.rational(*s, text, static_cast<int>(i) + 1 + off));
          }
        }
        if (static_cast<int>(point.size()) != ambient->base_dim()) {
          p_.fail(s->line, s->value_column + static_cast<int>(i),
                  "sample has " + std::to_string(point.size()) + " coordinates, " + ambient->name() + " has " +
                      std::to_string(ambient->base_dim()));
        }
        def.samples.push_back(std::move(point));
        i = close + 1;
      }
    }
    for (const auto& e : b.entries) {
      if (e.key != "homotopy" && e.key != "R" && e.key != "AR" && e.key != "samples") {
        p_.fail_key(e, "unknown key '" + e.key + "' in retraction block");
      }
    }
    doc_.subalgebroids_.emplace(b.name, SubalgebroidPresentation(ambient, def.dropped, def.kept_frame));
    doc_.retractions_.emplace(b.name, std::move(def));
  }

  Parser& p_;
  Document& doc_;
};

std::vector<std::string> Document::names(BlockKind kind) const {
  std::vector<std::string> out;
  for (const auto& b : order_) {
    if (b.kind == kind) out.push_back(b.name);
  }
  return out;
}

const BlockRef* Document::find(std::string_view name) const {
  for (const auto& b : order_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

namespace {
template <class Map>
const auto& lookup(const Map& m, const std::string& name, const char* kind) {
  const auto it = m.find(name);
  if (it == m.end()) throw std::out_of_range(std::string("no ") + kind + " named '" + name + "'");
  return it->second;
}
}  // namespace

AlgebroidPtr Document::algebroid(const std::string& name) const { return lookup(algebroids_, name, "algebroid"); }
const MatrixLieAlgebra& Document::liealg(const std::string& name) const { return *lookup(liealgs_, name, "liealg"); }
const BundleMap& Document::map(const std::string& name) const { return lookup(maps_, name, "map"); }
const NaturalHomotopy& Document::homotopy(const std::string& name) const {
  return lookup(homotopies_, name, "homotopy");
}
const PathDefinition& Document::path(const std::string& name) const { return lookup(paths_, name, "path"); }
const RetractionDefinition& Document::retraction(const std::string& name) const {
  return lookup(retractions_, name, "retraction");
}
const SubalgebroidPresentation& Document::subalgebroid(const std::string& name) const {
  return lookup(subalgebroids_, name, "retraction");
}

Document parse_document_text(std::string_view text, const std::string& file) {
  Parser parser(file);
  Document doc;
  DocumentBuilder(parser, doc).run(parser.split(text));
  return doc;
}

Document parse_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError(path, 0, 0, "cannot read file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document_text(buffer.str(), path);
}

AlgebroidForm parse_form(std::string_view text, const LieAlgebroid& algebroid) {
  const auto error = [&](std::size_t at, const std::string& message) -> DocumentError {
    return DocumentError("<form>", 1, static_cast<int>(at) + 1, message);
  };
  const Ring& ring = algebroid.ring();
  const auto parse_coefficient = [&](std::size_t from, std::size_t to) -> Polynomial {
    std::string_view c = text.substr(from, to - from);
    std::size_t offset = from;
    const auto skip = [&](std::size_t n) {
      c.remove_prefix(n);
      offset += n;
      const std::string_view t = trim(c);
      offset += static_cast<std::size_t>(t.data() - c.data());
      c = t;
    };
    skip(0);
    bool negate = false;
    if (!c.empty() && c.front() == '+') skip(1);
    if (!c.empty() && c.front() == '-' && (c.size() == 1 || !std::isdigit(static_cast<unsigned char>(c[1])))) {
      negate = true;
      skip(1);
    }
    int depth = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == '(') ++depth;
      if (c[i] == ')') --depth;
      if (depth == 0 && i > 0 && (c[i] == '+' || c[i] == '-')) {
        std::size_t k = i;
        while (k > 0 && std::isspace(static_cast<unsigned char>(c[k - 1]))) --k;
        if (c[i] == '+' || (k > 0 && c[k - 1] != '*' && c[k - 1] != '(' && c[k - 1] != '^')) {
          throw error(offset + i, "coefficients with several terms must be parenthesised");
        }
      }
    }
    try {
      const Polynomial p = c.empty() ? Polynomial::constant(ring, 1) : parse_poly(c, ring);
      return negate ? -p : p;
    } catch (const ParseError& err) {
      throw error(offset + err.offset(), err.what());
    }
  };

  struct Basis {
    std::size_t begin;
    std::size_t end;
    std::vector<int> indices;
  };
  std::vector<Basis> bases;
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    const bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    if (depth != 0 || !boundary || text.compare(i, 2, "e^") != 0) continue;
    Basis b{i, i, {}};
    std::size_t j = i;
    while (text.compare(j, 2, "e^") == 0 && j + 2 < text.size() && std::isdigit(static_cast<unsigned char>(text[j + 2]))) {
      std::size_t k = j + 2;
      int v = 0;
      while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) v = v * 10 + (text[k++] - '0');
      if (v < 1 || v > algebroid.rank()) throw error(j, "covector e^" + std::to_string(v) + " out of range");
      b.indices.push_back(v - 1);
      j = k;
      if (j < text.size() && text[j] == '^') ++j;
      else break;
    }
    if (b.indices.empty()) throw error(i, "expected a covector index after 'e^'");
    b.end = j;
    bases.push_back(std::move(b));
    i = j - 1;
  }
  if (bases.empty()) {
    try {
      return algebroid.function(parse_poly(text, ring));
    } catch (const ParseError& err) {
      throw error(err.offset(), err.what());
    }
  }

  const int degree = static_cast<int>(bases.front().indices.size());
  AlgebroidForm out(ring, algebroid.rank(), degree);
  std::size_t prev = 0;
  for (const auto& b : bases) {
    if (static_cast<int>(b.indices.size()) != degree) throw error(b.begin, "terms of different degree");
    std::size_t coeff_end = b.begin;
    while (coeff_end > prev && std::isspace(static_cast<unsigned char>(text[coeff_end - 1]))) --coeff_end;
    const bool has_star = coeff_end > prev && text[coeff_end - 1] == '*';
    if (has_star) --coeff_end;
    const std::string_view before = trim(text.substr(prev, coeff_end - prev));
    const bool sign_only = before.empty() || before == "+" || before == "-";
    if (!has_star && !sign_only) throw error(b.begin, "expected '*' before the covector");
    Polynomial coeff = parse_coefficient(prev, coeff_end);
    out += AlgebroidForm::basis(coeff, algebroid.rank(), b.indices);
    prev = b.end;
  }
  if (!trim(text.substr(prev)).empty()) throw error(prev, "unexpected text after the last term");
  return out;
}

}  // namespace akit::cli
