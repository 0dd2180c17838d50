#pragma once

// Metric-pair files. YAML documents of the form
//
//   name: dini                      # optional
//   notes: free text                # optional
//   dim: 2
//   coords: [x, y]
//   g:                              # lower triangle, or the full matrix
//     - ["x - y"]
//     - ["0", "x - y"]
//   gbar:
//     - ["(1/y - 1/x)/x"]
//     - ["0", "(1/y - 1/x)/y"]
//   domain:                         # open interval per coordinate
//     - [1.05, 2.95]
//     - [0.05, 0.95]
//
// When a full row is given, the entry above the diagonal must equal its
// mirror, either as text, as a parsed tree, or numerically at every probe
// point of the domain.

#include <string>

#include "projeq/errors.hpp"
#include "projeq/projective.hpp"

namespace projeq {

/// Positioned diagnostic; line and column are 1-based.
class PairFileError : public Error {
 public:
  PairFileError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  /// The message without the position prefix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

ProjectivePair parse_pair_text(const std::string& text);
/// Throws PairFileError (line 0) when the file cannot be read.
ProjectivePair load_pair_file(const std::string& path);
std::string write_pair_text(const ProjectivePair& pair);

}  // namespace projeq
