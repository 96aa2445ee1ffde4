#pragma once
// Definition files for the algebroid-kit tool.
//
//   # comment
//   [algebroid so3]
//   rank = 3
//   [e2,e3] = e1
//
// A line "[kind name]" opens a block, "key = value" lines fill it. Kinds are
// algebroid, liealg, map, homotopy, path and retraction; names are unique
// across the file and blocks may refer to blocks defined later.
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akit/group_case.hpp"
#include "akit/homotopy.hpp"
#include "akit/tangent_case.hpp"

namespace akit::cli {

/// Syntax or resolution error at a 1-based line and column.
class DocumentError : public std::runtime_error {
 public:
  DocumentError(std::string file, int line, int column, std::string message);
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string file_;
  int line_;
  int column_;
  std::string message_;
};

struct PathDefinition {
  std::string algebra;
  std::vector<Polynomial> theta;
  RationalMatrix phi0;
  std::optional<RationalMatrix> phi1;
};

struct RetractionDefinition {
  std::string homotopy;
  std::vector<int> dropped;
  std::vector<int> kept_frame;
  std::vector<std::vector<Rational>> samples;
};

enum class BlockKind { algebroid, liealg, map, homotopy, path, retraction };
const char* kind_name(BlockKind kind);

struct BlockRef {
  BlockKind kind;
  std::string name;
  int line;
};

class Document {
 public:
  /// Blocks in file order.
  const std::vector<BlockRef>& blocks() const { return order_; }
  std::vector<std::string> names(BlockKind kind) const;
  const BlockRef* find(std::string_view name) const;

  /// Algebroid blocks, and the point algebroids of liealg blocks.
  AlgebroidPtr algebroid(const std::string& name) const;
  const MatrixLieAlgebra& liealg(const std::string& name) const;
  const BundleMap& map(const std::string& name) const;
  const NaturalHomotopy& homotopy(const std::string& name) const;
  const PathDefinition& path(const std::string& name) const;
  const RetractionDefinition& retraction(const std::string& name) const;
  const SubalgebroidPresentation& subalgebroid(const std::string& retraction_name) const;

 private:
  friend class DocumentBuilder;
  std::vector<BlockRef> order_;
  std::map<std::string, AlgebroidPtr, std::less<>> algebroids_;
  std::map<std::string, std::shared_ptr<const MatrixLieAlgebra>, std::less<>> liealgs_;
  std::map<std::string, BundleMap, std::less<>> maps_;
  std::map<std::string, NaturalHomotopy, std::less<>> homotopies_;
  std::map<std::string, PathDefinition, std::less<>> paths_;
  std::map<std::string, RetractionDefinition, std::less<>> retractions_;
  std::map<std::string, SubalgebroidPresentation, std::less<>> subalgebroids_;
};

Document parse_document_text(std::string_view text, const std::string& file = "<input>");
/// Throws DocumentError (line 0) when the file cannot be read.
Document parse_document(const std::string& path);

/// Form in the rendering of AlgebroidForm::to_string, e.g. "x1*e^1 + (x2 - 1)*e^2^e^3".
/// Coefficients with several terms must be parenthesised. A form without
/// basis covectors is a function.
AlgebroidForm parse_form(std::string_view text, const LieAlgebroid& algebroid);

}  // namespace akit::cli
