#include "qcurv/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qcurv;
namespace fs = std::filesystem;

TEST_CASE("typed access with paths in errors") {
    Json j = Json::parse(R"({"a": 1.5, "b": 3, "c": "x", "d": [1, 2], "e": true, "p": [[0,0,0,0,0],[2,0,0,0,0]]})");
    CHECK(get_number(j, "a", "") == 1.5);
    CHECK(get_int(j, "b", "") == 3);
    CHECK(get_int_or(j, "zz", 7, "") == 7);
    CHECK(get_string_or(j, "c", "", "") == "x");
    CHECK(get_bool_or(j, "e", false, "") == true);
    CHECK(get_numbers(j, "d", "").size() == 2);
    CHECK(get_points(j, "p", 5, "").size() == 2);
    try {
        get_int(j, "a", "blk");
        FAIL("no throw");
    } catch (const ConfigError& e) {
        CHECK(e.where() == "blk.a");
    }
    CHECK_THROWS_AS(get_number(j, "missing", ""), ConfigError);
    CHECK_THROWS_AS(get_points(j, "p", 3, ""), ConfigError);
    CHECK_THROWS_AS(get_bool_or(j, "a", false, ""), ConfigError);
    CHECK_THROWS_AS(get_numbers(j, "c", ""), ConfigError);
}

TEST_CASE("parameters from a config") {
    auto P = params_from_config(Json::parse(R"({"n": 5, "sigma": 1.5})"));
    CHECK(P.gamma_s == 1.0);
    CHECK_THROWS_AS(params_from_config(Json::parse(R"({"n": 3, "sigma": 1.5})")), ConfigError);
    CHECK_THROWS_AS(params_from_config(Json::parse(R"({"n": 5.5, "sigma": 1.5})")), ConfigError);
}

TEST_CASE("serialization") {
    auto P = derive_params(5, 1.5);
    Json jp = to_json(P);
    CHECK(jp["gamma"] == 1.0);
    WeightSpec w;
    CHECK(to_json(w)["kind"] == "starstar");
    NeckSweep s;
    s.rows.push_back({2.0, 0.1, 0.01, 1e-12, 3, false, true, ""});
    s.rows.push_back({3.0, 0.0, 0.0, 0.0, 0, false, false, "boom"});
    Json js = to_json(s);
    CHECK(js["rows"][0]["eps"] == 0.1);
    CHECK(js["rows"][1]["error"] == "boom");
    CHECK_FALSE(js.contains("slope_eps"));
}

TEST_CASE("round-trip number format") {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) CHECK(std::stod(fmt(x)) == x);
}

TEST_CASE("files") {
    fs::path dir = fs::temp_directory_path() / "qcurv_io_test";
    fs::create_directories(dir);
    fs::path f = dir / "a.json";
    write_file_atomic(f, R"({"k": [1, 2, 3]})");
    CHECK_FALSE(fs::exists(dir / "a.json.tmp"));
    CHECK(read_json_file(f)["k"][2] == 3);
    write_file_atomic(f, "{ bad");
    CHECK_THROWS_AS(read_json_file(f), ConfigError);
    CHECK_THROWS_AS(read_json_file(dir / "none.json"), ConfigError);
    fs::remove_all(dir);
}
