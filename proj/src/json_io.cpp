#include "concentrate/json_io.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "concentrate/numeric.hpp"

namespace concentrate {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  return json::parse(in);  // parse_error carries the byte position
}

WeightedSpectrum spectrum_from_json(const json& j) {
  if (j.contains("values")) {
    const std::vector<double> values = j.at("values").get<std::vector<double>>();
    return WeightedSpectrum::from_values(values);
  }
  if (j.contains("entries")) {
    std::vector<std::pair<double, double>> entries;
    for (const auto& row : j.at("entries")) {
      if (!row.is_array() || row.size() != 2) {
        throw validation_error("entries rows must be [value, multiplicity]");
      }
      entries.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return WeightedSpectrum::from_entries(entries);
  }
  if (j.contains("iid")) {
    const auto& spec = j.at("iid");
    const std::vector<double> base =
        spec.at("base").get<std::vector<double>>();
    const long n = spec.at("n").get<long>();
    return iid_product(WeightedSpectrum::from_values(base), n);
  }
  throw validation_error(
      "spectrum JSON needs one of: values, entries, iid");
}

WeightedSpectrum load_spectrum(const std::string& path) {
  return spectrum_from_json(read_json_file(path));
}

json spectrum_to_json(const WeightedSpectrum& sp) {
  json entries = json::array();
  for (const auto& e : sp.entries()) {
    entries.push_back(json::array({e.value, e.count}));
  }
  return json{{"entries", entries}};
}

json report_to_json(const ProtocolReport& report) {
  json j{{"size", report.size},
         {"failure", report.failure},
         {"fidelity", report.fidelity}};
  if (report.threshold_x) j["threshold_x"] = *report.threshold_x;
  return j;
}

PartitionFunction partition_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<std::pair<double, double>> levels;
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != 2) {
        throw validation_error("level rows must be [energy, degeneracy]");
      }
      levels.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return PartitionFunction::from_levels(std::move(levels));
  }
  if (j.contains("table")) {
    std::vector<std::pair<double, double>> table;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 2) {
        throw validation_error("table rows must be [beta, xi]");
      }
      table.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return PartitionFunction::from_table(std::move(table));
  }
  throw validation_error("levels JSON must be an array or contain a table");
}

PartitionFunction load_partition(const std::string& path) {
  return partition_from_json(read_json_file(path));
}

PartitionMap partition_map_from_json(const json& j) {
  PartitionMap pm;
  pm.M = j.at("M").get<int>();
  for (const auto& b : j.at("assignment")) {
    pm.assignment.push_back(b.get<int>() - 1);  // JSON buckets are 1-based
  }
  pm.validate();
  return pm;
}

PartitionMap load_partition_map(const std::string& path) {
  return partition_map_from_json(read_json_file(path));
}

}  // namespace concentrate
