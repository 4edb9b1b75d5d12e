#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rigidnet/errors.hpp"
#include "rigidnet/io.hpp"

using namespace rigidnet;

namespace {

const char* kLine = R"({
  "label": "line",
  "n": 4,
  "A": [[0, 0.6, 0, 0], [0, 0, 0.6, 0], [0, 0, 0, 0.6], [0, 0, 0, 0]],
  "gamma": [0.25, 0.25, 0.25, 0.25],
  "theta": 0.5,
  "shock": {"kind": "single_node_exponential", "sector": 2, "lambda": 0.25},
  "signal": {"kind": "none"},
  "engine": {"backend": "analytic", "num_draws": 1000, "seed": 7}
})";

std::string message(const std::string& text) {
    try {
        parse_document(text, "doc.json");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedDocument);
        return e.what();
    }
    FAIL("document parsed");
    return {};
}

}  // namespace

TEST_CASE("parsing a document") {
    const Document d = parse_document(kLine);
    CHECK(d.economy.A(0, 1) == 0.6);
    CHECK(d.economy.theta.isApproxToConstant(0.5));
    REQUIRE(d.shock);
    const auto& s = std::get<SingleNodeExponential>(*d.shock);
    CHECK(s.sector == 1);
    CHECK(s.lambda == 0.25);
    CHECK(d.engine.backend == Backend::AnalyticExponential);
    CHECK(d.engine.num_draws == 1000);
    CHECK(d.engine.seed == 7);
    const Problem p = validate_document(d);
    CHECK(p.econ.n() == 4);
    CHECK(p.shock);
}

TEST_CASE("canonical text round trips") {
    const Document d = parse_document(kLine);
    const std::string text = canonical_text(d);
    const Document again = parse_document(text);
    CHECK(canonical_text(again) == text);
    CHECK(again.economy.A == d.economy.A);
    CHECK(again.economy.gamma == d.economy.gamma);
    CHECK(again.economy.theta == d.economy.theta);

    // full precision survives
    std::string odd = kLine;
    odd.replace(odd.find("0.25, 0.25, 0.25, 0.25"), 22, "0.1, 0.2, 0.30000000000000004, 0.39999999999999997");
    const Document o = parse_document(odd);
    CHECK(parse_document(canonical_text(o)).economy.gamma == o.economy.gamma);
}

TEST_CASE("partition cells with open bounds") {
    std::string text = kLine;
    text.replace(text.find(R"({"kind": "none"})"), 16,
                 R"({"kind": "partition", "cells": [
                     {"lower": [null, "-inf", null, null], "upper": [0, -2, 0, 0]},
                     {"lower": [null, -2, null, null], "upper": [0, 0, 0, 0]}]})");
    const Document d = parse_document(text);
    const auto& part = std::get<PartitionSignal>(d.signal);
    REQUIRE(part.cells.size() == 2);
    CHECK(std::isinf(part.cells[0].lower(1)));
    CHECK(part.cells[1].lower(1) == -2.0);
    const Document again = parse_document(canonical_text(d));
    CHECK(std::isinf(std::get<PartitionSignal>(again.signal).cells[0].lower(0)));
    const Problem p = validate_document(d);
    CHECK(p.signal.num_cells() == 2);
}

TEST_CASE("diagnostics point at the problem") {
    SUBCASE("syntax error") {
        const std::string m = message("{\n  \"n\": 4,\n  \"A\": [1, 2,\n}");
        CHECK(m.find("doc.json:4:") != std::string::npos);
        CHECK(m.find('^') != std::string::npos);
    }
    SUBCASE("wrong field type") {
        std::string text = kLine;
        text.replace(text.find("\"lambda\": 0.25"), 14, "\"lambda\": \"x\"");
        const std::string m = message(text);
        CHECK(m.find("shock.lambda") != std::string::npos);
        CHECK(m.find("doc.json:7") != std::string::npos);
    }
    SUBCASE("dimension mismatch") {
        std::string text = kLine;
        text.replace(text.find("\"n\": 4"), 6, "\"n\": 3");
        CHECK(message(text).find("gamma") != std::string::npos);
    }
    SUBCASE("negative seed") {
        std::string text = kLine;
        text.replace(text.find("\"seed\": 7"), 9, "\"seed\": -1");
        CHECK(message(text).find("seed") != std::string::npos);
    }
}

TEST_CASE("missing files and invalid economies") {
    try {
        read_document("/nonexistent/economy.json");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FileNotFound);
    }
    std::string text = kLine;
    text.replace(text.find("[0, 0, 0.6, 0]"), 14, "[0, 0, 1.6, 0]");
    try {
        validate_document(parse_document(text));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ColumnSumViolation);
    }
}

TEST_CASE("number formatting and csv output") {
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(-INFINITY) == "-inf");
    CHECK(fmt(NAN) == "nan");
    CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
    const Vector inf = Vector::Constant(1, INFINITY);
    CHECK(to_json(inf)[0].is_null());

    const auto dir = std::filesystem::temp_directory_path() / "rigidnet_io_test";
    std::filesystem::create_directories(dir);
    {
        CsvWriter w(dir / "t.csv", {{"seed", "42"}}, {"a", "b"});
        w.row({"1", "2"});
    }
    std::ifstream in(dir / "t.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "# seed=42\na,b\n1,2\n");
    std::filesystem::remove_all(dir);
}
