#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "histspec/experiments.hpp"
#include "histspec/history.hpp"

namespace histspec {

/// Doubles in circuit/Hamiltonian/state payloads are stored as C99 hex-float
/// strings, so round trips are bit-exact.
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

nlohmann::json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

nlohmann::json hamiltonian_to_json(const LocalHamiltonian& h);
LocalHamiltonian hamiltonian_from_json(const nlohmann::json& j);

nlohmann::json history_to_json(const HistoryState& hs);
HistoryState history_from_json(const nlohmann::json& j);

nlohmann::json spectrum_to_json(const SpectrumResult& r);
nlohmann::json normalization_to_json(const NormalizationReport& plain,
                                     const NormalizationReport* quasi);
std::string normalization_csv(const NormalizationReport& plain, const NormalizationReport* quasi);

nlohmann::json case1_to_json(const Case1Report& r);
nlohmann::json case2_to_json(const Case2Report& r);

nlohmann::json gap_report_to_json(const GapExperimentReport& r);
std::string gap_report_csv(const GapExperimentReport& r);
nlohmann::json split_report_to_json(const SplitExperimentReport& r);
std::string split_report_csv(const SplitExperimentReport& r);
nlohmann::json fh_report_to_json(const FhExperimentReport& r);
std::string fh_report_csv(const FhExperimentReport& r);

std::string dump_json(const nlohmann::json& j);  // stable key order, 2-space indent

}  // namespace histspec
