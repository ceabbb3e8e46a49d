#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run nullq(const std::string& args) {
  std::string cmd = std::string(NULLQ_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const char* name) { return std::string(NULLQ_DATA) + "/" + name; }

std::string files(const char* db, const char* q) { return data(db) + " " + data(q); }

}  // namespace

TEST(Cli, CertainAnswersOfSharedNullInstance) {
  for (const char* m : {"brute", "fo", "datalog"}) {
    auto r = nullq("certain " + files("shared_null.db", "shared_null.q") + " --method " + m);
    EXPECT_EQ(r.code, 0) << m;
    EXPECT_EQ(r.out, "") << m;
  }
}

TEST(Cli, BestAnswers) {
  for (const char* m : {"brute", "fo"}) {
    auto r = nullq("best " + files("shared_null.db", "shared_null.q") + " --method " + m);
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "_n2\n") << m;
  }
}

TEST(Cli, EvalVersusCertain) {
  auto e = nullq("eval " + files("gap.db", "gap.q"));
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(e.out, "1, _n1\n");
  auto c = nullq("certain " + files("gap.db", "gap.q"));
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "");
}

TEST(Cli, BooleanAndInlineQueries) {
  EXPECT_EQ(nullq("eval " + data("shared_null.db") + " 'exists x (R(x))'").out, "true\n");
  EXPECT_EQ(nullq("certain " + data("shared_null.db") + " 'exists x (S(x, x) & x = 1)'").out, "false\n");
}

TEST(Cli, Chase) {
  auto r = nullq("chase " + data("fd.db") + " --constraints " + data("key.egd"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "R(1, 2).\nS(2).\n");
  auto c = nullq("certain " + data("fd.db") + " 'S(x)' --constraints " + data("key.egd") + " --method chase");
  EXPECT_EQ(c.out, "2\n_n1\n");
  auto d = nullq("certain " + data("fd.db") + " 'S(x)' --constraints " + data("key.egd") + " --method datalog");
  EXPECT_EQ(d.out, c.out);
}

TEST(Cli, Inconsistent) {
  auto r = nullq("certain " + data("clash.db") + " 'exists y (R(x, y))' --constraints " + data("key.egd"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "INCONSISTENT\n");
  auto full = nullq("certain " + data("clash.db") + " 'exists y (R(x, y))' --constraints " + data("key.egd") +
                    " --vacuous full");
  EXPECT_EQ(full.out, "1\n2\n3\n");
}

TEST(Cli, Rewrite) {
  auto r = nullq("rewrite 'S(x) - R(x, x)' --target datalog");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("%% ANSWER x"), std::string::npos);
  EXPECT_NE(r.out.find("%% FO LAYER"), std::string::npos);
  auto fo = nullq("rewrite 'S(x) - R(x, x)' --target fo");
  EXPECT_EQ(fo.code, 0);
  EXPECT_EQ(fo.out.find("%%"), std::string::npos);
}

TEST(Cli, Decide) {
  auto base = "decide certain equal " + files("shared_null.db", "shared_null.q");
  EXPECT_EQ(nullq(base + " '{}'").out, "true\n");
  EXPECT_EQ(nullq("decide best member " + files("shared_null.db", "shared_null.q") + " '(_n2)'").out, "true\n");
  EXPECT_EQ(nullq("decide certain family " + files("shared_null.db", "shared_null.q") + " '{{(1)}, {(_n2)}}'").out,
            "false\n");
}

TEST(Cli, Generators) {
  auto t = nullq("gen tree 1");
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("# tree1.db"), std::string::npos);
  EXPECT_NE(t.out.find("# tree.egd"), std::string::npos);
  auto c = nullq("gen coloring " + data("triangle.graph"));
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("C(\"c3\")."), std::string::npos);
  EXPECT_EQ(nullq("gen random 4").out, nullq("gen random 4").out);
}

TEST(Cli, ExitCodes) {
  auto syntax = nullq("eval " + data("shared_null.db") + " 'R(x'");
  EXPECT_EQ(syntax.code, 1);
  EXPECT_NE(syntax.out.find("1:4"), std::string::npos);
  EXPECT_EQ(nullq("certain " + data("shared_null.db") + " " + data("missing.q")).code, 1);
  EXPECT_EQ(nullq("frobnicate").code, 1);
  EXPECT_EQ(nullq("certain " + data("shared_null.db") + " 'forall y (R(y))' --method chase").code, 1);
  EXPECT_EQ(nullq("certain " + data("fd.db") + " 'S(x)' --constraints " + data("key.egd") + " --method fo").code, 1);
  EXPECT_EQ(nullq("best " + data("shared_null.db") + " 'S(x, x) - R(x)' --method fo").code, 1);
}

TEST(Cli, ResourceExitCode) {
  std::string db = testing::TempDir() + "/nullq_cap.db";
  FILE* f = std::fopen(db.c_str(), "w");
  ASSERT_NE(f, nullptr);
  std::fputs("R(_a, _b).\nR(_c, _d).\nR(_e, _f).\nR(_g, _h).\n", f);
  std::fclose(f);
  auto r = nullq("certain " + db + " 'exists y (R(x, y)) - R(x, x)' --method brute");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("cap"), std::string::npos);
}
