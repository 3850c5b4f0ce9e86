#pragma once

#include <string>

#include <json.hpp>

#include "concentrate/protocols.hpp"
#include "concentrate/randomness.hpp"
#include "concentrate/spectrum.hpp"
#include "concentrate/thermal.hpp"

namespace concentrate {

// Accepts {"values":[...]}, {"entries":[[value,mult],...]} or
// {"iid":{"base":[...],"n":N}}.
WeightedSpectrum spectrum_from_json(const nlohmann::json& j);
WeightedSpectrum load_spectrum(const std::string& path);

// Entries form, mirroring the input schema.
nlohmann::json spectrum_to_json(const WeightedSpectrum& sp);

nlohmann::json report_to_json(const ProtocolReport& report);

// [[energy,degeneracy],...] or {"table":[[beta,xi],...]}.
PartitionFunction partition_from_json(const nlohmann::json& j);
PartitionFunction load_partition(const std::string& path);

// {"M":M,"assignment":[b_1..b_dim]} with 1-based buckets.
PartitionMap partition_map_from_json(const nlohmann::json& j);
PartitionMap load_partition_map(const std::string& path);

nlohmann::json read_json_file(const std::string& path);

}  // namespace concentrate
