#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gpinv/commands.hpp"
#include "gpinv/config.hpp"
#include "gpinv/error.hpp"

using namespace gpinv;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("gpinv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_text(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("literal parsing") {
  CHECK(parse_vector_literal("e3") == CoeffVector::basis(3));
  CHECK(parse_vector_literal("[7, 2]") == CoeffVector(std::vector<double>{7.0, 2.0}));
  CHECK(parse_vector_literal("7,2") == CoeffVector(std::vector<double>{7.0, 2.0}));
  CHECK(parse_vector_literal("tail(1, 2)") == CoeffVector::power_law(1.0, 2.0));
  CHECK(parse_vector_literal("[1, 0.5] + tail(3, 1.5)") ==
        CoeffVector(std::vector<double>{1.0, 0.5}, PowerTail{3.0, 1.5}));
  CHECK(code_of([] { parse_vector_literal("[1, x]"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_vector_literal("e0"); }) == ErrorCode::ConfigInvalid);

  CHECK(parse_complex_literal("i") == cplx(0.0, 1.0));
  CHECK(parse_complex_literal("2i") == cplx(0.0, 2.0));
  CHECK(parse_complex_literal("1+i") == cplx(1.0, 1.0));
  CHECK(parse_complex_literal("-0.5 - 2i") == cplx(-0.5, -2.0));
  CHECK(parse_complex_literal("1e-3+1e2i") == cplx(1e-3, 1e2));
  CHECK(parse_complex_literal("3") == cplx(3.0, 0.0));
  for (cplx z : {cplx(0.0, 1.0), cplx(-0.1, 0.3), cplx(1e-17, -2.5)}) {
    CHECK(parse_complex_literal(format_complex_literal(z)) == z);
  }
  const CoeffVector v(std::vector<double>{0.1, 1.0 / 3.0}, PowerTail{0.7, 2.25});
  CHECK(parse_vector_literal(format_vector_literal(v)) == v);
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigInvalid);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("run.schedule = 8, 4\n").find("run.schedule") != std::string::npos);
  CHECK(message("run.schedule = 8, 4\n").find("non-increasing") != std::string::npos);
  CHECK(message("model.colour = red\n").find("model.colour") != std::string::npos);
  CHECK(message("model.name = linear\nmodel.name = harmonic\n").find("duplicate") != std::string::npos);
  CHECK(message("model.name = nope\n").find("model.name") != std::string::npos);
  CHECK(message("model.name = linear\nmodel.shift = 2\n").find("model.shift") != std::string::npos);
  CHECK(message("probe.lambdas = i, 2\n").find("probe.lambdas") != std::string::npos);
  CHECK(message("data.y = tail(1, 0.5)\n").find("data.y") != std::string::npos);
  CHECK(message("output.format = xml\n").find("output.format") != std::string::npos);
  CHECK(message("just words\n").find("line 1") != std::string::npos);
}

TEST_CASE("effective config round-trips") {
  const char* texts[] = {
      "model.name = linear\ndata.y = tail(1, 2)\n",
      "model.kind = diagonal\nmodel.rule = custom\nmodel.prefix = 0, 1\nmodel.tail_scale = 2\n"
      "model.tail_power = -0.5\nmodel.label = mine\nmodel.expected = Unknown\ndata.y = [7, 2] + tail(1, 3)\n"
      "run.schedule = 3, 9, 27\nrun.rank_rel_tol = 1e-10\nrun.diagnostics = resolvent, graph\n"
      "probe.vectors = e1; q: [0, 1, 2]\nprobe.lambdas = 1+i, -2i\ncheck.final_tol = 1e-5\n",
      "model.kind = jacobi\nmodel.rule = shifted\nmodel.shift = 2.5\nrun.rank_mode = analytic\n"
      "output.format = json\noutput.path = r.json\n",
      "model.kind = jacobi\nmodel.rule = custom\nmodel.diag_prefix = 1, 2\nmodel.diag_tail = 0.5\n"
      "model.off_prefix = 3\nmodel.off_tail = 1\nrun.exact_rank = 4\nprobe.perturbation_scale = 0.25\n",
  };
  for (const char* text : texts) {
    CAPTURE(text);
    const auto first = parse_config(text);
    const auto kv = first.effective();
    const auto second = parse_config(config_text(kv));
    CHECK(second.effective() == kv);
    CHECK(second.y == first.y);
    CHECK(second.run.schedule == first.run.schedule);
    CHECK(second.model.rule_description() == first.model.rule_description());
  }
}

TEST_CASE("schedule cap drops larger entries") {
  const auto cfg = parse_config("run.schedule = 2, 4, 8, 16\n", 10);
  CHECK(cfg.run.schedule == std::vector<std::size_t>{2, 4, 8});
  CHECK_THROWS_AS(parse_config("run.schedule = 20, 40\n", 10), Error);
}

TEST_CASE("gallery listing") {
  std::ostringstream all, jac;
  CHECK(cmd_gallery_list("", all) == 0);
  CHECK(all.str().find("harmonic") != std::string::npos);
  CHECK(all.str().find("Unstable") != std::string::npos);
  bool saw_linear = false;
  std::istringstream lines(all.str());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("linear ", 0) == 0) saw_linear = line.find("Stable") != std::string::npos;
  }
  CHECK(saw_linear);
  CHECK(cmd_gallery_list("jacobi", jac) == 0);
  std::istringstream jl(jac.str());
  int count = 0;
  for (std::string line; std::getline(jl, line); ++count) CHECK(line.find("Jacobi") != std::string::npos);
  CHECK(count == 2);
}

TEST_CASE("run exit codes") {
  TempDir dir;
  std::ostringstream out, err;
  const auto lin = dir.write("lin.cfg", "model.name = linear\ndata.y = tail(1, 2)\n");
  CHECK(cmd_run(lin, {(dir / "lin.csv").string(), std::nullopt}, out, err) == 0);
  CHECK(slurp(dir / "lin.csv").find("# verdict = Convergent") != std::string::npos);

  const auto harm = dir.write("harm.cfg", "model.name = harmonic\ndata.y = e1\n");
  CHECK(cmd_run(harm, {(dir / "harm.json").string(), ReportFormat::Json}, out, err) == 2);
  CHECK(slurp(dir / "harm.json").find("\"verdict\": \"Divergent\"") != std::string::npos);

  const auto inc = dir.write("inc.cfg", "model.name = linear\ndata.y = tail(1, 2)\nrun.residual_tol = 1e-12\n");
  CHECK(cmd_run(inc, {(dir / "inc.csv").string(), std::nullopt}, out, err) == 3);

  std::ostringstream err2;
  const auto bad = dir.write("bad.cfg", "run.schedule = 8, 4\n");
  CHECK(cmd_run(bad, {}, out, err2) == 1);
  CHECK(err2.str().find("non-increasing") != std::string::npos);
  CHECK(cmd_run(dir / "missing.cfg", {}, out, err) == 1);
}

TEST_CASE("check exit codes") {
  TempDir dir;
  std::ostringstream out, err;
  const auto lin = dir.write("lin.cfg", "model.name = linear\n");
  CHECK(cmd_check(lin, "resolvent", {(dir / "r.csv").string(), std::nullopt}, out, err) == 0);
  const auto kg = dir.write("kg.cfg", "model.name = kernel_gap\nprobe.vectors = x: [7, 2, 5]; e1\n");
  CHECK(cmd_check(kg, "projection", {(dir / "p.csv").string(), std::nullopt}, out, err) == 0);
  const auto report = slurp(dir / "p.csv");
  CHECK(report.find("projection,4,x:kernel,,,0.0000000000000000e+00") != std::string::npos);

  std::ostringstream err2;
  const auto free = dir.write("free.cfg", "model.name = jacobi_free\n");
  CHECK(cmd_check(free, "projection", {}, out, err2) == 1);
  CHECK(err2.str().find("UnsupportedModel") != std::string::npos);

  const auto strict = dir.write("strict.cfg", "model.name = linear\ncheck.final_tol = 1e-20\nrun.schedule = 2, 4\n"
                                              "probe.vectors = p: tail(1, 3)\n");
  CHECK(cmd_check(strict, "resolvent", {(dir / "s.csv").string(), std::nullopt}, out, err) == 2);
  CHECK(cmd_check(lin, "bogus", {}, out, err) == 1);
}

TEST_CASE("report metadata reproduces the effective configuration") {
  TempDir dir;
  std::ostringstream out, err;
  const auto cfg_path = dir.write("c.cfg", "model.name = kernel_gap\ndata.y = [7, 2]\nrun.schedule = 2, 4, 8\n");
  CHECK(cmd_run(cfg_path, {(dir / "r.csv").string(), std::nullopt}, out, err) == 0);
  std::istringstream in(slurp(dir / "r.csv"));
  std::string text;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# ", 0) != 0) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(2, eq - 2);
    if (key.find('.') == std::string::npos) continue;
    text += key + " = " + line.substr(eq + 3) + "\n";
  }
  CHECK(parse_config(text).effective() == parse_config(slurp(cfg_path)).effective());
}

TEST_CASE("reports are byte-identical across runs") {
  TempDir dir;
  std::ostringstream out, err;
  const auto cfg = dir.write("c.cfg", "model.name = linear\ndata.y = tail(1, 2)\nrun.diagnostics = resolvent\n");
  for (auto fmt : {ReportFormat::Csv, ReportFormat::Json}) {
    CHECK(cmd_run(cfg, {(dir / "a").string(), fmt}, out, err) == 0);
    CHECK(cmd_run(cfg, {(dir / "b").string(), fmt}, out, err) == 0);
    CHECK(slurp(dir / "a") == slurp(dir / "b"));
  }
}

TEST_CASE("report rows are ordered by n, probe, lambda") {
  ResidualTable t;
  t.suite = "x";
  t.rows = {{4, "b", cplx(0, 1), 1.0}, {2, "b", cplx(0, 2), 1.0}, {2, "b", cplx(0, 1), 1.0}, {2, "a", std::nullopt, 1.0}};
  const auto rows = sorted_rows(t);
  CHECK(rows[0].probe_id == "a");
  CHECK(rows[1].lambda == cplx(0, 1));
  CHECK(rows[2].lambda == cplx(0, 2));
  CHECK(rows[3].n == 4);
}
