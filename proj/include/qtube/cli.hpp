#ifndef QTUBE_CLI_HPP
#define QTUBE_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtube/pipeline.hpp"

namespace qtube {

/// Batch run description, read from JSON.
struct RunConfig {
    std::filesystem::path geometry_path;
    std::optional<DuctGeometry> geometry;
    std::optional<double> rounding;
    std::vector<double> k2;
    std::vector<int> N;
    int L = 0;
    PipelineOptions pipeline;
    double flux_tolerance = 1e-6;
    std::filesystem::path output;
    int workers = 1;
    int verbosity = 0;

    // mufield lattice
    std::optional<double> u_min, u_max;
    int nu = 101;
    int nv = 21;

    // compose
    std::vector<double> cuts;
    bool verify = false;

    std::string source; ///< the JSON text as read, echoed into output headers

    /// Geometry with the rounding override applied.
    DuctGeometry duct() const;
};

/// Parses a config; relative geometry paths are resolved against base_dir.
/// Throws InvalidArgument / GeometryError on bad input.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Subcommands. Each writes its table to out and returns the process exit code.
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_converge(const RunConfig& cfg, std::ostream& out);
int cmd_mufield(const RunConfig& cfg, std::ostream& out);
int cmd_compose(const RunConfig& cfg, std::ostream& out);

/// Fixed 12-significant-digit formatting used by every table.
std::string format_number(double x);

} // namespace qtube

#endif
