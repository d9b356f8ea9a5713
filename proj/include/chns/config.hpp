#pragma once

#include <string>

#include "chns/scheme.hpp"

namespace chns {

enum class Preset { manufactured, ellipse, square };

struct OutputConfig {
    std::string dir = "out";
    std::vector<double> snapshots;
    int csv_stride = 1;
};

struct RunConfig {
    Rect domain{0.0, 1.0, 0.0, 1.0};
    int nx = 16;
    int ny = 16;
    SchemeParams params;
    double T = 0.01;
    Preset preset = Preset::manufactured;
    Vec2 body_force{0.0, 0.0};
    OutputConfig output;

    void validate() const; // throws std::invalid_argument
};

/// Parses a line-based key=value document. `#` starts a comment. A
/// `preset` key installs that experiment's parameter defaults before the
/// remaining keys are applied. Errors carry the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Emits every key; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Initial phase field of a preset, evaluated pointwise.
double preset_phi0(Preset preset, double x, double y);

const char* preset_name(Preset preset);

} // namespace chns
