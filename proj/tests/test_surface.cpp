#include <gtest/gtest.h>

#include "refi/surface.hpp"
#include "test_support.hpp"

using namespace refi;
using namespace refi::surface;
namespace rt = refi::testing;

namespace {

CoreProgram core_of(const std::string& text) { return desugar(parse_program(text)); }

std::vector<std::string> def_names(const CoreProgram& p) {
  std::vector<std::string> out;
  for (const auto& d : p.defs) out.push_back(d.name);
  return out;
}

}  // namespace

TEST(Surface, CountingDesugarsToSingleAssignment) {
  auto core = core_of(rt::read_file(rt::corpus_path("counting.rfi")));
  EXPECT_EQ(def_names(core), (std::vector<std::string>{"_g1", "_g2", "_g3", "_g4", "_g5", "addrs", "timer", "_g6",
                                                       "count", "_g7", "_g8", "_g9", "_g10"}));
  const auto* g6 = core.find_def("_g6");
  ASSERT_TRUE(g6);
  EXPECT_EQ(g6->kind, ReactiveKind::FoldAll);
  EXPECT_EQ(g6->inputs, (std::vector<std::string>{"timer", "addrs"}));
  EXPECT_EQ(g6->fns, (std::vector<std::string>{"_g6_arm0", "_g6_arm1"}));
  const auto* g8 = core.find_def("_g8");
  EXPECT_EQ(g8->kind, ReactiveKind::Snapshot);
  EXPECT_EQ(g8->inputs, (std::vector<std::string>{"timer", "_g7"}));
  EXPECT_EQ(core.find_def("_g7")->kind, ReactiveKind::Change);
  EXPECT_EQ(core.find_def("_g1")->source, (SourceSpec{SourceKind::Timer, 10}));
  EXPECT_EQ(core.find_def("_g10")->kind, ReactiveKind::Observe);
  EXPECT_TRUE(core.find_fn("addrs_fn"));
  EXPECT_TRUE(core.find_fn("_g2_fn"));
}

TEST(Surface, FileSharingDesugars) {
  auto core = core_of(rt::read_file(rt::corpus_path("filesharing.rfi")));
  EXPECT_EQ(core.defs.size(), 16u);
  const auto* keys = core.find_def("keys");
  ASSERT_TRUE(keys);
  EXPECT_EQ(keys->kind, ReactiveKind::Choice);
  ASSERT_EQ(keys->inputs.size(), 2u);
  EXPECT_EQ(core.find_def(keys->inputs[0])->fns, std::vector<std::string>{"src_key"});
  const auto* avg = core.find_def("avgSnrPerSrc");
  EXPECT_EQ(avg->kind, ReactiveKind::Fold);
  EXPECT_EQ(avg->inputs, (std::vector<std::string>{"count", "frames", "keys"}));
  EXPECT_EQ(avg->fns, std::vector<std::string>{"avgSnrPerSrc_fn"});
}

TEST(Surface, PrintCoreRoundTrips) {
  for (const char* stem : {"counting", "filesharing", "two_input_map"}) {
    SCOPED_TRACE(stem);
    auto core = core_of(rt::read_file(rt::corpus_path(std::string(stem) + ".rfi")));
    const auto printed = print_core(core);
    auto again = core_of(printed);
    EXPECT_TRUE(same_structure(core, again)) << printed;
    EXPECT_EQ(print_core(again), printed);
  }
}

TEST(Surface, CommentsAndAnnotations) {
  auto core = core_of(
      "// leading comment\n"
      "const K : Int32 = -4\n"
      "sig twice : (Int32) -> Int32\n"
      "def twice = x => { x * 2 } // trailing\n"
      "val p : Reactive[Int32] = Source(TxPower).map(twice)\n"
      "/* block\n comment */\n"
      "p.observe(SetTxPower)\n");
  ASSERT_EQ(core.constants.size(), 1u);
  EXPECT_EQ(core.constants[0].literal, "-4");
  ASSERT_EQ(core.signatures.size(), 1u);
  const auto* p = core.find_def("p");
  ASSERT_TRUE(p);
  ASSERT_TRUE(p->annotation);
  EXPECT_EQ(*p->annotation, ReactiveType::reactive(TypeTag::int32()));
}

TEST(Surface, TimerUnits) {
  auto core = core_of("val a = Source(Timer(1000ms))\nval b = Source(Timer(250ms))\n(a || b).observe(SendToOS)\n");
  EXPECT_EQ(core.find_def("a")->source.period_ms, 1000);
  EXPECT_EQ(core.find_def("b")->source.period_ms, 250);
  EXPECT_THROW(parse_program("val a = Source(Timer(1s))\n"), CompileError);
  EXPECT_THROW(parse_program("val a = Source(Timer(10))\n"), CompileError);
}

TEST(Surface, RejectsDuplicateBindings) {
  EXPECT_THROW(parse_program("val a = Source(Monitor)\nval a = Source(Monitor)\n"), CompileError);
  EXPECT_THROW(parse_program("def f = x => { x }\ndef f = x => { x }\n"), CompileError);
}

TEST(Surface, RejectsUseBeforeDefinition) {
  try {
    parse_program("val b = a.map(x => { x })\nval a = Source(TxPower)\n");
    FAIL() << "expected a CompileError";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.span().line, 1);
  }
  EXPECT_THROW(parse_program("val b = Source(TxPower).map(g)\n"), CompileError);
}

TEST(Surface, SyntaxErrorsHavePositions) {
  try {
    parse_program("val a = Source(Monitor)\nval b = a.filter(\n");
    FAIL() << "expected a CompileError";
  } catch (const CompileError& e) {
    EXPECT_GE(e.span().line, 2);
    EXPECT_GT(e.span().column, 0);
  }
  EXPECT_THROW(parse_program("val a = Source(Timer(0ms))\n"), CompileError);
  EXPECT_THROW(parse_program("val = Source(Monitor)\n"), CompileError);
  EXPECT_THROW(parse_program("val a = Source(Monitor).map(x => { x }\n"), CompileError);
}

TEST(Surface, SignatureTable) {
  auto t = parse_signature_table(
      "// comment\n"
      "\n"
      "ADDR = 02:00:00:00:00:01 : MacAddr\n"
      "f : (Int32, Frame) -> Bool\n"
      "g : () -> Set[MacAddr, 8]\n");
  ASSERT_EQ(t.constants.size(), 1u);
  EXPECT_EQ(t.constants[0].name, "ADDR");
  ASSERT_EQ(t.functions.size(), 2u);
  EXPECT_EQ(t.functions.at("f").params.size(), 2u);
  EXPECT_EQ(t.functions.at("f").result, TypeTag::boolean());
  EXPECT_TRUE(t.functions.at("g").params.empty());
  EXPECT_THROW(parse_signature_table("f : Int32 -> Bool\n"), CompileError);
}

TEST(Surface, RandomProgramsRoundTripThroughPrintCore) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SCOPED_TRACE(seed);
    const auto rp = rt::random_program(seed);
    auto core = core_of(rp.source);
    EXPECT_TRUE(same_structure(core, core_of(print_core(core))));
  }
}
