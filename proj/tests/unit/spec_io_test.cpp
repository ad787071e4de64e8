#include <gtest/gtest.h>

#include "bellising/boltzmann.hpp"
#include "bellising/builtin.hpp"
#include "bellising/spec_io.hpp"

using namespace bellising;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_lattice(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::Precondition;
}

// Structural problems the parser leaves to validation.
ErrorKind kind_when_built(const std::string& text) {
  try {
    build_model(parse_lattice(text));
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::Precondition;
}

const std::string kRoles =
    R"({"id": "1", "role": "outcome1"}, {"id": "2", "role": "outcome2"},)"
    R"({"id": "a", "role": "analyzer_a"}, {"id": "b", "role": "analyzer_b"})";

}  // namespace

TEST(SpecIo, LoadsFileWithAllFields) {
  const auto spec = load_lattice(std::string(BELLISING_TEST_DATA) + "/small.json");
  EXPECT_EQ(spec.size(), 5u);
  EXPECT_DOUBLE_EQ(spec.beta, 0.5);
  EXPECT_EQ(spec.nodes[4].role, NodeRole::Hidden);
  EXPECT_DOUBLE_EQ(spec.node("a").h, -0.5);
  ASSERT_EQ(spec.cubic.size(), 1u);
  EXPECT_DOUBLE_EQ(spec.c0, 2.0);
  EXPECT_NO_THROW(build_model(spec));
}

TEST(SpecIo, RoundTrip) {
  const auto spec = builtin::hetero_ladder();
  const auto back = lattice_from_json(lattice_to_json(spec));
  ASSERT_EQ(back.size(), spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    EXPECT_EQ(back.nodes[k].id, spec.nodes[k].id);
    EXPECT_EQ(back.nodes[k].role, spec.nodes[k].role);
    EXPECT_EQ(back.nodes[k].h, spec.nodes[k].h);
  }
  ASSERT_EQ(back.edges.size(), spec.edges.size());
  for (std::size_t i = 0; i < spec.edges.size(); ++i) EXPECT_EQ(back.edges[i].j, spec.edges[i].j);
}

TEST(SpecIo, Rejections) {
  EXPECT_EQ(kind_of("{"), ErrorKind::Parse);
  EXPECT_EQ(kind_of("[]"), ErrorKind::Parse);
  EXPECT_EQ(kind_of(R"({"nodes": [)" + kRoles + R"(], "edges": []})"), ErrorKind::Parse);  // beta missing
  EXPECT_EQ(kind_of(R"({"beta": 1, "nodes": [)" + kRoles + R"(], "edges": [], "extra": 1})"), ErrorKind::Parse);
  EXPECT_EQ(kind_of(R"({"beta": 1, "nodes": [)" + kRoles + R"(, {"id": "x", "role": "photon"}], "edges": []})"),
            ErrorKind::Parse);
  EXPECT_EQ(kind_of(R"({"beta": 1, "nodes": [)" + kRoles + R"(, {"id": "1"}], "edges": []})"),
            ErrorKind::InvalidSpec);
  EXPECT_EQ(kind_when_built(R"({"beta": 1, "nodes": [)" + kRoles + R"(], "edges": [{"a": "1", "b": "q", "j": 1}]})"),
            ErrorKind::InvalidSpec);
  EXPECT_EQ(kind_when_built(R"({"beta": -1, "nodes": [)" + kRoles + R"(], "edges": []})"), ErrorKind::InvalidSpec);
}

TEST(SpecIo, ParseErrorMentionsLocation) {
  try {
    parse_lattice("{\"beta\": 1,, }");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos) << e.what();
  }
}

TEST(SpecIo, MissingFileIsParseError) {
  try {
    load_lattice("/nonexistent/spec.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(Builtin, Names) {
  for (const auto& name : builtin::names()) {
    if (name == "chain<N>") continue;
    EXPECT_TRUE(builtin::by_name(name).has_value()) << name;
  }
  EXPECT_TRUE(builtin::by_name("chain7").has_value());
  EXPECT_FALSE(builtin::by_name("chainx").has_value());
  EXPECT_FALSE(builtin::by_name("chain99999999999999999999").has_value());
  EXPECT_FALSE(builtin::by_name("nope").has_value());
}
