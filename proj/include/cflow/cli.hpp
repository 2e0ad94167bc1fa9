#ifndef CFLOW_CLI_HPP
#define CFLOW_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cflow/types.hpp"

namespace cflow::cli {

// Canonical form: every schema key present (defaults filled), values re-printed.
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::string out_path;
    std::int64_t seed = 0;

    bool operator==(const RunConfig&) const = default;

    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    cplx complex(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& str(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<cplx> complexes(const std::string& key) const;
    std::vector<std::string> strings(const std::string& key) const;
};

const std::vector<std::string>& subcommands();
// Keys accepted by a subcommand (excluding out, seed, config).
std::vector<std::string> schema_keys(const std::string& subcommand);

// key = value lines, '#' comments.  ParseError carries the line number.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Merge raw values (file first, then flags) into a validated canonical RunConfig.
// ValidationError names the offending key.
RunConfig make_config(const std::string& subcommand, const std::map<std::string, std::string>& file_values,
                      const std::map<std::string, std::string>& flag_values);

// argv -> RunConfig (subcommand first, then --key value / --key=value, --config path).
RunConfig parse_args(int argc, const char* const* argv);

std::string canonical_echo(const RunConfig& cfg);

// Runs the subcommand; returns the exit code (0 ok, 1 usage, 2 numeric).  Diagnostics go to err.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Whole-process entry: parse, run, map exceptions to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
std::string render_svg(const std::vector<std::string>& csv_paths, const std::string& x_col, const std::string& y_col);

}  // namespace cflow::cli

#endif
