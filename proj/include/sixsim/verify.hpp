#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sixsim/scenario.hpp"

namespace sixsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    nlohmann::ordered_json details; // seed-determined content only, no timings
};

struct VerifyOptions {
    std::string scenario_dir;     // directory with the shipped scenario files
    std::string out_dir;          // artifacts (verdicts.json, summary.csv, plots/)
    std::vector<int> criteria;    // empty: all
    int threads = 0;              // 0: library default
    std::uint64_t seed_override = 0; // 0: seeds from the scenario files
};

struct VerifyResult {
    std::vector<CriterionResult> criteria;
    bool all_pass = false;
};

// Runs the verification suite: one line per criterion on `log`, artifacts in
// options.out_dir (when set). Throws on execution errors (missing or tampered
// scenario files, replica failures).
VerifyResult run_verification(const VerifyOptions& options, std::ostream& log);

// Built-in definitions of the shipped regime scenarios, keyed by file stem.
// The files under the scenario directory may change replicas/base_seed/threads
// but must otherwise match these definitions.
std::vector<std::string> builtin_scenario_stems();
Scenario builtin_scenario(const std::string& stem);

// Serialization used for verdicts.json; byte-identical for identical results.
std::string verdicts_to_json(const VerifyResult& result);

} // namespace sixsim
