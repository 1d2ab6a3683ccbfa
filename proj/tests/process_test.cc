#include "patchloc/process.h"

#include <gtest/gtest.h>

#include <chrono>
#include <csignal>

#include "patchloc/error.h"
#include "test_support.h"

namespace patchloc {
namespace {

using testing::Locs;
using namespace std::chrono_literals;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(TraceStreamTest, ParsesLowercaseHexLines) {
  ExecutionTrace t = ParseTraceStream("18\n1c\n8\nb\nffffffffffffffff\n", 100);
  EXPECT_EQ(t.events, Locs({0x18, 0x1c, 8, 11, 0xffffffffffffffffULL}));
  EXPECT_FALSE(t.truncated);
}

TEST(TraceStreamTest, DropsPartialFinalRecord) {
  // A crash can cut the last write short.
  EXPECT_EQ(ParseTraceStream("a\nb\nc", 100).events, Locs({10, 11}));
  EXPECT_TRUE(ParseTraceStream("", 100).events.empty());
}

TEST(TraceStreamTest, MalformedRecordsAreProtocolErrors) {
  for (const char* bad : {"A\n", "0x1\n", "\n", "1 \n", "g\n", "1\n\n2\n",
                          "11111111111111111\n", "-1\n"}) {
    EXPECT_EQ(CodeOf([&] { ParseTraceStream(bad, 100); }),
              ErrorCode::kTraceProtocolError)
        << bad;
  }
}

TEST(TraceStreamTest, CapMarksTruncation) {
  ExecutionTrace t = ParseTraceStream("1\n2\n3\n4\n", 2);
  EXPECT_EQ(t.events, Locs({1, 2}));
  EXPECT_TRUE(t.truncated);
  EXPECT_FALSE(ParseTraceStream("1\n2\n", 2).truncated);
}

TEST(TraceStreamTest, FormatRoundTrip) {
  auto events = Locs({0, 1, 0xabc, 0xffffffffffffffffULL});
  std::string wire = FormatTraceStream(events);
  EXPECT_EQ(wire, "0\n1\nabc\nffffffffffffffff\n");
  EXPECT_EQ(ParseTraceStream(wire, 100).events, events);
}

TEST(CommandLineTest, SplitsAndSubstitutes) {
  EXPECT_EQ(SplitCommandLine("prog -x {INPUT}"),
            (std::vector<std::string>{"prog", "-x", "{INPUT}"}));
  EXPECT_EQ(SplitCommandLine("  a 'b c'  \"d e\" f\\ g "),
            (std::vector<std::string>{"a", "b c", "d e", "f g"}));
  EXPECT_EQ(SplitCommandLine("a 'it''s' \"q\\\"q\""),
            (std::vector<std::string>{"a", "its", "q\"q"}));
  EXPECT_TRUE(SplitCommandLine("   ").empty());
  EXPECT_EQ(SubstituteInput({"p", "--in={INPUT}", "{INPUT}{INPUT}"}, "/t/x"),
            (std::vector<std::string>{"p", "--in=/t/x", "/t/x/t/x"}));
}

TEST(TempFileTest, WriteReadAndCleanup) {
  std::string path;
  {
    TempFile f("unit");
    path = f.path();
    f.Write(Bytes{'h', 'i', 0, '!'});
    EXPECT_EQ(f.ReadAll(), std::string("hi\0!", 4));
  }
  EXPECT_NE(access(path.c_str(), F_OK), 0);
}

ProcessOutcome Sh(const std::string& script,
                  std::chrono::milliseconds timeout = 5000ms) {
  ProcessRequest r;
  r.argv = {"/bin/sh", "-c", script};
  r.timeout = timeout;
  return RunProcess(r);
}

TEST(RunProcessTest, ExitStatus) {
  ProcessOutcome ok = Sh("exit 0");
  EXPECT_EQ(ok.kind, ProcessOutcome::Kind::kExited);
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_EQ(Sh("exit 42").exit_code, 42);
}

TEST(RunProcessTest, Signals) {
  ProcessOutcome segv = Sh("kill -SEGV $$");
  EXPECT_EQ(segv.kind, ProcessOutcome::Kind::kSignaled);
  EXPECT_EQ(segv.signal, SIGSEGV);
  EXPECT_EQ(Sh("kill -FPE $$").signal, SIGFPE);
}

TEST(RunProcessTest, TimeoutKillsTheGroup) {
  auto start = std::chrono::steady_clock::now();
  ProcessOutcome slow = Sh("sleep 30 & sleep 30", 200ms);
  auto took = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(slow.kind, ProcessOutcome::Kind::kTimedOut);
  EXPECT_LT(took, 5s);
}

TEST(RunProcessTest, LaunchFailure) {
  ProcessRequest r;
  r.argv = {"/nonexistent/program"};
  EXPECT_EQ(CodeOf([&] { RunProcess(r); }), ErrorCode::kTargetLaunchFailure);
  r.argv = {"no-such-program-on-path-xyz"};
  EXPECT_EQ(CodeOf([&] { RunProcess(r); }), ErrorCode::kTargetLaunchFailure);
  r.argv = {};
  EXPECT_EQ(CodeOf([&] { RunProcess(r); }), ErrorCode::kTargetLaunchFailure);
}

TEST(RunProcessTest, EnvironmentAndStdin) {
  TempFile in("stdin");
  in.Write(Bytes{'x', 'y'});
  ProcessRequest r;
  r.argv = {"/bin/sh", "-c", "test \"$PATCHLOC_PROBE\" = yes && "
                             "test \"$(cat)\" = xy"};
  r.extra_env = {{"PATCHLOC_PROBE", "yes"}};
  r.stdin_path = in.path();
  EXPECT_EQ(RunProcess(r).exit_code, 0);
  r.stdin_path.reset();
  EXPECT_NE(RunProcess(r).exit_code, 0);
}

}  // namespace
}  // namespace patchloc
