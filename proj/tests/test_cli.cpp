#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"
#include "fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cubic3;
using cli::ordered_json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cubic3");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cubic3_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ordered_json analyze_json(const std::string& fixture, const std::string& commands, const std::string& seed) {
  auto r = invoke({"analyze", "@" + fixtures::path(fixture), "--commands", commands, "--seed", seed, "--json", "-"});
  REQUIRE(r.code == 0);
  return ordered_json::parse(r.out);
}

}  // namespace

TEST_CASE("smooth cubic: sigma undefined with a note, smooth Hodge numbers") {
  auto r = invoke({"analyze", "x0^3+x1^3+x2^3+x3^3+x4^3", "--commands", "defect,hodge", "--seed", "1", "--json", "-"});
  REQUIRE(r.code == 0);
  auto j = ordered_json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["seed"] == 1);
  CHECK(j["defect"]["smooth"] == true);
  CHECK(j["defect"]["sigma"].is_null());
  CHECK_FALSE(j["defect"]["notes"].empty());
  CHECK(j["hodge"]["h3"]["value"] == 10);
  CHECK(j["hodge"]["h12"]["value"] == 5);
  CHECK(j["hodge"]["h21"]["value"] == 5);
  CHECK_FALSE(j.contains("singular"));
}

TEST_CASE("Segre cubic: ten nodes and sigma 5") {
  auto j = analyze_json("segre", "singular,defect", "3");
  CHECK(j["singular"]["points"].size() == 10);
  for (const auto& p : j["singular"]["points"]) {
    CHECK(p["type"] == "A1");
    CHECK(p["corank"]["value"] == 0);
    CHECK(p["corank"]["certification"] == "exact");
  }
  CHECK(j["defect"]["sigma"]["value"] == 5);
  for (const auto& p : j["defect"]["projections"]) CHECK(p["k"] == 6);
}

TEST_CASE("f2: sigma 1, a plane, no very good line") {
  auto j = analyze_json("f2", "defect,hodge,surfaces,lines", "7");
  CHECK(j["defect"]["sigma"]["value"] == 1);
  CHECK(j["defect"]["sigma"]["certification"] == "certified-numeric");
  CHECK(j["hodge"]["h3"]["value"] == 5);
  CHECK(j["surfaces"]["contains_plane"]["value"] == "yes");
  CHECK(j["surfaces"]["consistent_with_sigma"] == true);
  CHECK(j["lines"]["very_good_count"] == 0);
  for (const auto& l : j["lines"]["lines"]) {
    REQUIRE(l["status"] == "ok");
    CHECK(l["discriminant_degree"] == 5);
    CHECK(l["very_good"]["value"] == false);
  }
}

TEST_CASE("f1 full run") {
  auto j = analyze_json("f1", "singular,defect,hodge,surfaces", "5");
  CHECK(j["defect"]["sigma"]["value"] == 0);
  CHECK(j["hodge"]["mu_total"]["value"] == 6);
  CHECK(j["hodge"]["h3"]["value"] == 4);
  CHECK(j["surfaces"]["contains_plane"]["value"] == "no");
  CHECK(j["surfaces"]["contains_scroll"]["value"] == "no");
}

TEST_CASE("cone: sigma 6 and the line commands skipped") {
  auto j = analyze_json("cone", "singular,defect,hodge,surfaces,lines", "2");
  CHECK(j["defect"]["cone"] == true);
  CHECK(j["defect"]["sigma"]["value"] == 6);
  CHECK(j["defect"]["sigma"]["certification"] == "exact");
  CHECK(j["hodge"]["h3"]["value"] == 0);
  CHECK(j["lines"]["status"] == "skipped");
  CHECK_FALSE(j["lines"]["reason"].get<std::string>().empty());
  CHECK(j["surfaces"]["status"] == "skipped");
}

TEST_CASE("same seed, same bytes") {
  std::string a = temp_path("a.json"), b = temp_path("b.json");
  auto r1 = invoke({"analyze", "@" + fixtures::path("f2"), "--seed", "7", "--json", a});
  auto r2 = invoke({"analyze", "@" + fixtures::path("f2"), "--seed", "7", "--json", b});
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("seconds") == std::string::npos);
  // Timings go to the human summary only.
  CHECK(r1.out.find("timings:") != std::string::npos);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("a fresh seed is echoed") {
  auto r = invoke({"analyze", "@" + fixtures::path("one_node"), "--commands", "defect", "--json", "-"});
  REQUIRE(r.code == 0);
  auto j = ordered_json::parse(r.out);
  REQUIRE(j["seed"].is_number_unsigned());
  auto again = analyze_json("one_node", "defect", std::to_string(j["seed"].get<std::uint64_t>()));
  CHECK(again.dump() == j.dump());
}

TEST_CASE("parse errors exit with 2") {
  auto inhomogeneous = invoke({"analyze", "x0^2 + x1^3"});
  CHECK(inhomogeneous.code == 2);
  CHECK(inhomogeneous.err.find("inhomogeneous") != std::string::npos);
  CHECK(inhomogeneous.err.find("^") != std::string::npos);
  CHECK(invoke({"analyze", "x0^3 + x7^3"}).code == 2);
  CHECK(invoke({"analyze", "x0^3 + x1^3", "--frobnicate"}).code == 2);
  CHECK(invoke({"analyze", "x0^3 + x1^3", "--commands", "defect,astrology"}).code == 2);
  CHECK(invoke({"analyze", "x0^2 + x1^2"}).code == 2);
  CHECK(invoke({"analyze", "@/nonexistent/file.txt"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"analyze", "x0^3", "--tol", "-1"}).code == 2);
}

TEST_CASE("pipeline errors exit with 3 and are recorded per command") {
  // Singular along the plane x0 = x1 = 0.
  auto r = invoke({"analyze", "x0^2*x2 + x1^2*x3 + x0*x1*x4", "--commands", "singular,defect", "--seed", "1", "--json", "-"});
  CHECK(r.code == 3);
  auto j = ordered_json::parse(r.out.substr(r.out.find('{')));
  CHECK(j["singular"]["status"] == "error");
  CHECK(j["defect"]["status"] == "error");
}

TEST_CASE("config file, overridden by flags") {
  std::string path = temp_path("config.json");
  {
    std::ofstream c(path);
    c << R"({"seed": 9, "commands": ["defect"], "tracker": {"max_step": 0.04}})";
  }
  auto r = invoke({"analyze", "@" + fixtures::path("one_node"), "--config", path, "--json", "-"});
  REQUIRE(r.code == 0);
  auto j = ordered_json::parse(r.out);
  CHECK(j["seed"] == 9);
  CHECK(j["settings"]["max_step"] == 0.04);
  CHECK(j["commands"] == ordered_json::array({"defect"}));
  auto overridden = invoke({"analyze", "@" + fixtures::path("one_node"), "--config", path, "--seed", "10", "--json", "-"});
  CHECK(ordered_json::parse(overridden.out)["seed"] == 10);
  {
    std::ofstream c(path);
    c << R"({"sead": 9})";
  }
  CHECK(invoke({"analyze", "@" + fixtures::path("one_node"), "--config", path}).code == 2);
  std::filesystem::remove(path);
}

TEST_CASE("lines command") {
  SUBCASE("an explicit line through a singular point is rejected") {
    auto r = invoke({"lines", "@" + fixtures::path("f2"), "--through", "1,0,0,0,0", "0,0,0,0,1", "--seed", "2",
                     "--json", "-"});
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["lines"]["lines"][0]["status"] == "rejected");
  }
  SUBCASE("the Fermat line is not good, with a witness") {
    auto r = invoke({"lines", "@" + fixtures::path("fermat"), "--through", "1,-1,0,0,0", "0,0,1,-1,0", "--seed", "2",
                     "--json", "-"});
    REQUIRE(r.code == 0);
    auto l = ordered_json::parse(r.out)["lines"]["lines"][0];
    CHECK(l["good"]["value"] == "no");
    CHECK(l["good"]["certification"] == "exact");
    CHECK_FALSE(l["good"]["witness"].is_null());
    CHECK(l["discriminant"].is_string());
  }
  SUBCASE("sampled lines on a smooth cubic are very good") {
    auto r = invoke({"lines", "@" + fixtures::path("fermat"), "--sample", "2", "--seed", "4", "--json", "-"});
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["lines"]["very_good_count"] == 2);
  }
  CHECK(invoke({"lines", "@" + fixtures::path("f2"), "--through", "1,0,0,0,0", "2,0,0,0,0"}).code == 2);
  CHECK(invoke({"lines", "@" + fixtures::path("f2"), "--through", "1,0,0", "0,1,0"}).code == 2);
}

TEST_CASE("batch over the fixture directory") {
  std::string path = temp_path("batch.json");
  auto r = invoke({"batch", CUBIC3_FIXTURES, "--commands", "defect,surfaces", "--seed", "4", "--json", path});
  CHECK(r.code == 0);
  auto j = ordered_json::parse(slurp(path));
  CHECK(j["results"].size() >= 12);
  for (const auto& row : j["results"]) {
    CAPTURE(row["name"].get<std::string>());
    const auto& d = row["report"]["defect"];
    REQUIRE(d["status"] == "ok");
    if (d["cone"] == true || d["smooth"] == true) continue;
    const auto& s = row["report"]["surfaces"];
    bool fires = s["contains_plane"]["value"] == "yes" || s["contains_scroll"]["value"] == "yes";
    CHECK(fires == (d["sigma"]["value"].get<int>() > 0));
  }
  std::filesystem::remove(path);
}
