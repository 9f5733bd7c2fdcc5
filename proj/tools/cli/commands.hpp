#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace slc::cli {

using Params = nlohmann::json;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // formatted cells
};

struct CommandOutput {
    Table table;
    std::vector<std::string> notes;  // "key: value" lines after the header
    nlohmann::json extra = nlohmann::json::object();
    bool bare_value = false;  // single value, printed without header on stdout
    int exit_code = 0;
};

// Keys a command accepts in its config file and from flags.
const std::vector<std::string>& allowed_keys(const std::string& command);

CommandOutput run_curv(const Params& p);
CommandOutput run_bounds(const Params& p);
CommandOutput run_solve(const Params& p);
CommandOutput run_foliate(const Params& p);
CommandOutput run_kp(const Params& p, std::uint64_t seed);
CommandOutput run_verify(const Params& p, std::uint64_t seed);

}  // namespace slc::cli
