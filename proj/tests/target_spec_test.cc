#include "patchloc/target_spec.h"

#include <gtest/gtest.h>

#include <random>

#include "patchloc/error.h"
#include "test_support.h"

namespace patchloc {
namespace {

using testing::Locs;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(TargetSpecTest, WriteArrayTraces) {
  TargetSpec spec = testing::LoadFixture("write_array");
  Interpretation exploit = Interpret(spec, Bytes{10, 15, 2}, 100);
  EXPECT_EQ(exploit.trace.events, Locs({24, 28, 8, 11, 2}));
  EXPECT_EQ(exploit.terminal, Terminal::kCrash);
  EXPECT_FALSE(exploit.trace.truncated);

  // A bigger buffer takes the other allocation and survives, yet still
  // passes the allocation branch.
  Interpretation benign = Interpret(spec, Bytes{10, 5, 2}, 100);
  EXPECT_EQ(benign.trace.events, Locs({24, 28, 8, 11, 2}));
  EXPECT_EQ(benign.terminal, Terminal::kExitOk);

  Interpretation large = Interpret(spec, Bytes{11, 15, 2}, 100);
  EXPECT_EQ(large.terminal, Terminal::kExitOk);
  Interpretation too_long = Interpret(spec, Bytes{10, 21, 2}, 100);
  EXPECT_EQ(too_long.trace.events, Locs({24, 28, 8}));
  Interpretation tag1 = Interpret(spec, Bytes{10, 15, 1}, 100);
  EXPECT_EQ(tag1.trace.events, Locs({24, 8, 11, 2}));
  EXPECT_EQ(tag1.terminal, Terminal::kCrash);
  Interpretation tag3 = Interpret(spec, Bytes{10, 15, 3}, 100);
  EXPECT_EQ(tag3.trace.events, Locs({24, 28, 30, 2}));
  EXPECT_EQ(tag3.terminal, Terminal::kExitOk);
}

TEST(TargetSpecTest, OrGuardTraces) {
  TargetSpec spec = testing::LoadFixture("or_guard");
  Interpretation exploit = Interpret(spec, Bytes{1, 4, 2, 3, 0}, 100);
  EXPECT_EQ(exploit.trace.events, Locs({10, 11, 13, 15}));
  EXPECT_EQ(exploit.terminal, Terminal::kCrash);
  // One side of the disjunction suffices.
  EXPECT_EQ(Interpret(spec, Bytes{1, 4, 9, 3, 0}, 100).trace.events,
            Locs({10, 11, 13, 15}));
  EXPECT_EQ(Interpret(spec, Bytes{1, 4, 2, 9, 0}, 100).trace.events,
            Locs({10, 11, 13, 15}));
  EXPECT_EQ(Interpret(spec, Bytes{1, 4, 9, 9, 0}, 100).trace.events,
            Locs({10, 11, 13}));
  EXPECT_EQ(Interpret(spec, Bytes{0, 4, 2, 3, 0}, 100).trace.events,
            Locs({10, 13, 15}));
}

TEST(TargetSpecTest, LoopIsTruncatedAtEventCap) {
  TargetSpec spec = ParseTargetSpec(
      "arity 1\n"
      "entry spin\n"
      "node spin loc 7 if in[0] == 0 then spin else EXIT_OK\n");
  Interpretation run = Interpret(spec, Bytes{0}, 50);
  EXPECT_TRUE(run.trace.truncated);
  EXPECT_EQ(run.trace.events.size(), 50u);
  Interpretation done = Interpret(spec, Bytes{1}, 50);
  EXPECT_FALSE(done.trace.truncated);
  EXPECT_EQ(done.trace.events, Locs({7}));
}

TEST(TargetSpecTest, ShortInputRejected) {
  TargetSpec spec = testing::LoadFixture("write_array");
  EXPECT_EQ(CodeOf([&] { Interpret(spec, Bytes{1, 2}, 10); }),
            ErrorCode::kInvalidArgument);
}

TEST(TargetSpecTest, PrintParseRoundTrip) {
  for (const char* name : {"write_array", "or_guard"}) {
    TargetSpec spec = testing::LoadFixture(name);
    std::string printed = PrintTargetSpec(spec);
    TargetSpec again = ParseTargetSpec(printed);
    EXPECT_EQ(again, spec) << printed;
    EXPECT_EQ(PrintTargetSpec(again), printed);
  }
}

TEST(TargetSpecTest, ParseErrors) {
  const char* bad[] = {
      "entry a\nnode a loc 1 if true then EXIT_OK else CRASH\n",  // no arity
      "arity 1\nnode a loc 1 if true then EXIT_OK else CRASH\n",  // no entry
      "arity 1\nentry a\nnode a loc 1 if true then b else CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if x == 1 then EXIT_OK else CRASH\n",
      "arity 1\nbyte if 0\nentry a\nnode a loc 1 if true then CRASH else "
      "CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if in[3] then CRASH else CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if (1 then CRASH else CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if 1 then CRASH else CRASH extra\n",
      "arity 1\nentry a\nnode a loc 1 if 1 then CRASH else CRASH\n"
      "node a loc 2 if 1 then CRASH else CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if 1 $ 2 then CRASH else CRASH\n",
      "arity 1\nentry a\nnode a loc 1 if - in[0] then CRASH else CRASH\n",
      "arity 1\nentry zz\nnode a loc 1 if 1 then CRASH else CRASH\n",
      "arity 2\nbyte x 5\nentry a\nnode a loc 1 if 1 then CRASH else CRASH\n",
      "arity 1\nentry a\nbogus\nnode a loc 1 if 1 then CRASH else CRASH\n",
  };
  for (const char* text : bad) {
    EXPECT_EQ(CodeOf([&] { ParseTargetSpec(text); }), ErrorCode::kParse)
        << text;
  }
}

TEST(TargetSpecTest, SharedLocationsAndLiterals) {
  TargetSpec spec = ParseTargetSpec(
      "arity 2\n"
      "byte x 0\n"
      "entry a\n"
      "node a loc 0x10 if x * 2 - 1 >= 0x9 && !(in[1] != 3) then b else c\n"
      "node b loc 5 if false || x + -1 == 4 then CRASH else EXIT_OK\n"
      "node c loc 5 if true then EXIT_OK else CRASH\n");
  EXPECT_EQ(Interpret(spec, Bytes{5, 3}, 10).terminal, Terminal::kCrash);
  EXPECT_EQ(Interpret(spec, Bytes{5, 3}, 10).trace.events, Locs({16, 5}));
  EXPECT_EQ(Interpret(spec, Bytes{5, 4}, 10).trace.events, Locs({16, 5}));
  EXPECT_EQ(Interpret(spec, Bytes{5, 4}, 10).terminal, Terminal::kExitOk);
}

TEST(ExprTest, ShortCircuitAndWrapping) {
  Bytes in{200, 100};
  Expr sum = Expr::Binary(BinaryOp::kAdd, Expr::Byte(0), Expr::Byte(1));
  EXPECT_EQ(sum.Evaluate(in), 300);
  Expr neg = Expr::Binary(BinaryOp::kSub, Expr::Byte(1), Expr::Byte(0));
  EXPECT_EQ(neg.Evaluate(in), -100);
  Expr big = Expr::Binary(BinaryOp::kMul, Expr::Constant(INT64_MAX),
                          Expr::Constant(2));
  EXPECT_EQ(big.Evaluate(in), -2);  // wraps instead of overflowing
  EXPECT_EQ(Expr::Not(Expr::Constant(7)).Evaluate(in), 0);
  EXPECT_EQ(sum.MinInputLength(), 2u);
}

// Random expression trees survive printing and reparsing unchanged, which
// exercises precedence and parenthesization exhaustively enough.
Expr RandomExpr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  switch (pick(rng)) {
    case 0:
      return Expr::Constant(
          std::uniform_int_distribution<std::int64_t>(-300, 300)(rng));
    case 1:
      return Expr::Byte(std::uniform_int_distribution<std::size_t>(0, 3)(rng));
    case 2:
      return Expr::Not(RandomExpr(rng, depth - 1));
    default: {
      auto op = static_cast<BinaryOp>(
          std::uniform_int_distribution<int>(0, 10)(rng));
      return Expr::Binary(op, RandomExpr(rng, depth - 1),
                          RandomExpr(rng, depth - 1));
    }
  }
}

TEST(ExprTest, PrintParseRoundTripProperty) {
  std::mt19937_64 rng(42);
  std::map<std::size_t, std::string> names{{0, "alpha"}, {2, "gamma"}};
  for (int i = 0; i < 500; ++i) {
    Expr e = RandomExpr(rng, 5);
    std::string text = e.ToString(names);
    TargetSpec spec = ParseTargetSpec(
        "arity 4\nbyte alpha 0\nbyte gamma 2\nentry n\nnode n loc 1 if " +
        text + " then CRASH else EXIT_OK\n");
    ASSERT_EQ(spec.nodes[0].predicate, e) << text;
    Bytes in{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
             static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    EXPECT_EQ(spec.nodes[0].predicate.Evaluate(in), e.Evaluate(in));
  }
}

}  // namespace
}  // namespace patchloc
