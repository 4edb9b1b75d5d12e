#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidnet/defaults.hpp"
#include "rigidnet/economy.hpp"
#include "rigidnet/equilibrium.hpp"
#include "rigidnet/montecarlo.hpp"
#include "rigidnet/scenarios.hpp"
#include "rigidnet/shocks.hpp"

namespace rigidnet {

using Json = nlohmann::json;

// One input document: economy, shock, signal and engine. Sector indices
// are 1-based in documents and zero-based in the API.
struct Document {
    EconomySpec economy;
    std::optional<ShockKind> shock;
    SignalKind signal = NoSignal{};
    EngineConfig engine;
};

struct Problem {
    Economy econ;
    std::optional<ShockModel> shock;
    SignalModel signal;
    EngineConfig engine;
    std::vector<std::string> warnings;
};

// Parse errors carry the source name, line, column and the offending line.
Document parse_document(const std::string& text, const std::string& source = "<input>");
Document read_document(const std::filesystem::path& path);
Problem validate_document(const Document& doc);

// Canonical form: sorted keys, full precision, omitted optional fields
// stay omitted. Re-parsing yields an identical document.
Json to_json(const Document& doc);
std::string canonical_text(const Document& doc);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const Solution& s);
Json to_json(const SimulationReport& r);
Json to_json(const DefaultClassification& c);
Json to_json(const TableResult& t);

// Small CSV writer; every file starts with "# key=value" provenance lines.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& header,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

std::string fmt(double v);

void write_histogram(const std::filesystem::path& path, const Histogram& h,
                     const std::vector<std::pair<std::string, std::string>>& header);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rigidnet
