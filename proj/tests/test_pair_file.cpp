#include <gtest/gtest.h>

#include "projeq/pair_file.hpp"

namespace projeq {
namespace {

const char* kDini = R"(name: dini
dim: 2
coords: [x, y]
g:
  - ["x - y"]
  - ["0", "x - y"]
gbar:
  - ["(1/y - 1/x)/x"]
  - ["0", "(1/y - 1/x)/y"]
domain:
  - [1.05, 2.95]
  - [0.05, 0.95]
)";

PairFileError error_of(const std::string& text) {
  try {
    parse_pair_text(text);
  } catch (const PairFileError& e) {
    return e;
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return PairFileError("", 0, 0);
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(PairFile, ParsesLowerTriangle) {
  const ProjectivePair p = parse_pair_text(kDini);
  EXPECT_EQ(p.name, "dini");
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.coordinates(), (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(p.domain[1].hi, 0.95);
  const std::vector<double> q{2.0, 0.5};
  EXPECT_DOUBLE_EQ(p.g.component(0, 1).eval(q), 0.0);
  EXPECT_DOUBLE_EQ(p.g.component(1, 1).eval(q), 1.5);
  EXPECT_DOUBLE_EQ(p.gbar.component(0, 0).eval(q), (2.0 - 0.5) / 2.0);
}

TEST(PairFile, AcceptsSymmetricFullRows) {
  // Text, tree and numeric matches of the mirrored entry.
  for (const char* upper : {"\"0\"", "\"0.0\"", "\"x - x\""}) {
    const std::string text = replace(kDini, "  - [\"x - y\"]\n  - [\"0\", \"x - y\"]",
                                     std::string("  - [\"x - y\", ") + upper +
                                         "]\n  - [\"0\", \"x - y\"]");
    EXPECT_NO_THROW(parse_pair_text(text)) << upper;
  }
  const std::string off = replace(kDini, "  - [\"x - y\"]\n  - [\"0\", \"x - y\"]",
                                  "  - [\"x - y\", \"x*y/4\"]\n  - [\"y*x/4\", \"x - y\"]");
  EXPECT_NO_THROW(parse_pair_text(off));
}

TEST(PairFile, RejectsAsymmetricRows) {
  const std::string text = replace(kDini, "  - [\"x - y\"]\n  - [\"0\", \"x - y\"]",
                                   "  - [\"x - y\", \"0.1\"]\n  - [\"0\", \"x - y\"]");
  const PairFileError e = error_of(text);
  EXPECT_EQ(e.line(), 5);
  EXPECT_NE(e.message().find("symmetric"), std::string::npos) << e.message();
}

TEST(PairFile, ExpressionErrorsPointIntoTheCell) {
  const PairFileError e = error_of(replace(kDini, "[\"0\", \"x - y\"]", "[\"0\", \"x - * y\"]"));
  EXPECT_EQ(e.line(), 6);
  // The cell opens with a quote at column 11; '*' is the fifth character inside.
  EXPECT_EQ(e.column(), 16);
  EXPECT_NE(std::string(e.what()).find("6:16"), std::string::npos) << e.what();
}

TEST(PairFile, UnknownCoordinateIsPositioned) {
  const PairFileError e = error_of(replace(kDini, "[\"x - y\"]\n", "[\"x - z\"]\n"));
  EXPECT_EQ(e.line(), 5);
  EXPECT_EQ(e.column(), 11);
}

TEST(PairFile, FieldErrors) {
  EXPECT_EQ(error_of(std::string(kDini) + "colour: red\n").line(), 13);
  EXPECT_NE(error_of(replace(kDini, "dim: 2\n", "")).message().find("dim"), std::string::npos);
  EXPECT_EQ(error_of(replace(kDini, "dim: 2", "dim: 5")).line(), 2);
  // Two coordinates for dim 3 are reported at the coordinate list.
  EXPECT_EQ(error_of(replace(kDini, "dim: 2", "dim: 3")).line(), 3);
  EXPECT_EQ(error_of(replace(kDini, "[x, y]", "[x, x]")).line(), 3);
  EXPECT_EQ(error_of(replace(kDini, "[x, y]", "[x, sin]")).line(), 3);
  EXPECT_EQ(error_of(replace(kDini, "[x, y]", "[x, 2y]")).line(), 3);
  EXPECT_EQ(error_of(replace(kDini, "[0.05, 0.95]", "[0.95, 0.05]")).line(), 12);
  EXPECT_EQ(error_of(replace(kDini, "[0.05, 0.95]", "[0.05, .inf]")).line(), 12);
  EXPECT_EQ(error_of(replace(kDini, "  - [0.05, 0.95]\n", "")).line(), 11);
  EXPECT_EQ(error_of(replace(kDini, "[\"0\", \"x - y\"]", "[\"0\", \"x - y\", \"1\"]")).line(), 6);
}

TEST(PairFile, MalformedYamlIsPositioned) {
  const PairFileError e = error_of("dim: 2\ncoords: [x, y\n");
  EXPECT_GT(e.line(), 0);
}

TEST(PairFile, MissingFileHasLineZero) {
  try {
    load_pair_file("/nonexistent/pair.yaml");
    FAIL();
  } catch (const PairFileError& e) {
    EXPECT_EQ(e.line(), 0);
  }
}

TEST(PairFile, WriterRoundTrips) {
  const ProjectivePair p = parse_pair_text(kDini);
  const std::string text = write_pair_text(p);
  const ProjectivePair back = parse_pair_text(text);
  EXPECT_EQ(write_pair_text(back), text);
  for (int k = 0; k < 4; ++k) {
    EXPECT_TRUE(p.g.components[k].same_tree(back.g.components[k]));
    EXPECT_TRUE(p.gbar.components[k].same_tree(back.gbar.components[k]));
  }
  EXPECT_EQ(back.domain[0].lo, 1.05);
}

TEST(PairFile, NotesAreOptionalAndPreserved) {
  const ProjectivePair p =
      parse_pair_text(replace(kDini, "dim: 2", "notes: \"a: quoted note\"\ndim: 2"));
  EXPECT_EQ(p.notes, "a: quoted note");
  EXPECT_EQ(parse_pair_text(write_pair_text(p)).notes, "a: quoted note");
}

}  // namespace
}  // namespace projeq
