#include "chns/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chns {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(int line, const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(line, "cannot parse number for " + key + ": '" + value + "'");
    }
}

int parse_int(int line, const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(line, "cannot parse integer for " + key + ": '" + value + "'");
    }
}

bool parse_bool(int line, const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(line, key + " must be true or false, got '" + value + "'");
}

std::vector<double> parse_list(int line, const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(line, key, trim(item)));
    }
    return out;
}

void apply_preset(RunConfig& c, Preset preset) {
    c.preset = preset;
    switch (preset) {
        case Preset::manufactured:
            c.domain = {0.0, 1.0, 0.0, 1.0};
            c.nx = c.ny = 16;
            c.params.mobility = 0.1;
            c.params.lambda = 0.04;
            c.params.nu = 0.01;
            c.params.epsilon = 0.2;
            c.params.tau = 1.0 / (16.0 * 16.0 * 16.0);
            c.T = 0.01;
            c.body_force = {0.0, 0.0};
            c.output.snapshots = {};
            break;
        case Preset::ellipse:
            c.domain = {-0.4, 0.4, -0.4, 0.4};
            c.nx = c.ny = 64;
            c.params.mobility = 0.1;
            c.params.lambda = 0.1;
            c.params.nu = 1.0;
            c.params.epsilon = 0.01;
            c.params.tau = 1e-7;
            c.T = 1e-3;
            c.body_force = {1.0, 0.0};
            c.output.snapshots = {0.0, 5e-6, 1e-5, 5e-5, 5e-4, 1e-3};
            break;
        case Preset::square:
            c.domain = {0.0, 1.0, 0.0, 1.0};
            c.nx = c.ny = 64;
            c.params.mobility = 0.002;
            c.params.lambda = 0.1;
            c.params.nu = 1.0;
            c.params.epsilon = 0.01;
            c.params.tau = 1e-5;
            c.T = 0.01;
            c.body_force = {0.0, 0.0};
            c.output.snapshots = {};
            break;
    }
}

Preset parse_preset(int line, const std::string& value) {
    if (value == "manufactured") return Preset::manufactured;
    if (value == "ellipse") return Preset::ellipse;
    if (value == "square") return Preset::square;
    fail(line, "unknown preset '" + value + "'");
}

} // namespace

void RunConfig::validate() const {
    if (!domain.valid()) throw std::invalid_argument("config: domain is empty");
    if (nx < 1 || ny < 1) throw std::invalid_argument("config: nx and ny must be >= 1");
    if (T <= 0) throw std::invalid_argument("config: T must be positive");
    params.validate();
    for (double s : output.snapshots) {
        if (s < -1e-12 || s > T * (1.0 + 1e-9)) {
            throw std::invalid_argument("config: snapshot time outside [0, T]");
        }
    }
    if (output.csv_stride < 1) {
        throw std::invalid_argument("config: output.csv_stride must be >= 1");
    }
}

RunConfig parse_config(const std::string& text) {
    struct Entry {
        int line;
        std::string key, value;
    };
    std::vector<Entry> entries;
    {
        std::stringstream ss(text);
        std::string raw;
        int line = 0;
        while (std::getline(ss, raw)) {
            ++line;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            raw = trim(raw);
            if (raw.empty()) continue;
            const auto eq = raw.find('=');
            if (eq == std::string::npos) fail(line, "expected key = value");
            entries.push_back({line, trim(raw.substr(0, eq)), trim(raw.substr(eq + 1))});
        }
    }

    RunConfig c;
    bool preset_seen = false;
    for (const auto& e : entries) {
        if (e.key == "preset") {
            if (preset_seen) fail(e.line, "duplicate preset key");
            preset_seen = true;
            apply_preset(c, parse_preset(e.line, e.value));
        }
    }

    for (const auto& e : entries) {
        const int ln = e.line;
        const std::string& k = e.key;
        const std::string& v = e.value;
        if (k == "preset") continue;
        if (k == "domain.x0") c.domain.x0 = parse_double(ln, k, v);
        else if (k == "domain.x1") c.domain.x1 = parse_double(ln, k, v);
        else if (k == "domain.y0") c.domain.y0 = parse_double(ln, k, v);
        else if (k == "domain.y1") c.domain.y1 = parse_double(ln, k, v);
        else if (k == "nx") c.nx = parse_int(ln, k, v);
        else if (k == "ny") c.ny = parse_int(ln, k, v);
        else if (k == "M") c.params.mobility = parse_double(ln, k, v);
        else if (k == "lambda") c.params.lambda = parse_double(ln, k, v);
        else if (k == "nu") c.params.nu = parse_double(ln, k, v);
        else if (k == "epsilon") c.params.epsilon = parse_double(ln, k, v);
        else if (k == "C0") c.params.C0 = parse_double(ln, k, v);
        else if (k == "tau") c.params.tau = parse_double(ln, k, v);
        else if (k == "T") c.T = parse_double(ln, k, v);
        else if (k == "lambda_on_fprime") c.params.lambda_on_fprime = parse_bool(ln, k, v);
        else if (k == "body_force.x") c.body_force.x = parse_double(ln, k, v);
        else if (k == "body_force.y") c.body_force.y = parse_double(ln, k, v);
        else if (k == "output.dir") c.output.dir = v;
        else if (k == "output.snapshots") c.output.snapshots = parse_list(ln, k, v);
        else if (k == "output.csv_stride") c.output.csv_stride = parse_int(ln, k, v);
        else if (k == "solver.method") {
            if (v == "cg") c.params.solver.method = SolverMethod::cg;
            else if (v == "bicgstab") c.params.solver.method = SolverMethod::bicgstab;
            else fail(ln, "solver.method must be cg or bicgstab");
        } else if (k == "solver.rel_tol") c.params.solver.rel_tol = parse_double(ln, k, v);
        else if (k == "solver.max_iters") c.params.solver.max_iters = parse_int(ln, k, v);
        else fail(ln, "unknown key '" + k + "'");

        // Re-check invariants eagerly so the error names the line.
        try {
            if (k == "tau" || k == "T" || k.starts_with("domain.") || k == "nx" ||
                k == "ny" || k == "M" || k == "lambda" || k == "nu" || k == "epsilon" ||
                k == "C0" || k.starts_with("solver.") || k == "output.csv_stride") {
                // Partial validation: only the constraints that do not
                // depend on keys still to come.
                if (c.T <= 0) throw std::invalid_argument("T must be positive");
                if (c.params.tau <= 0) throw std::invalid_argument("tau must be positive");
                if (c.nx < 1 || c.ny < 1) throw std::invalid_argument("nx, ny must be >= 1");
                if (c.params.mobility <= 0 || c.params.lambda <= 0 || c.params.nu <= 0 ||
                    c.params.epsilon <= 0 || c.params.C0 <= 0) {
                    throw std::invalid_argument("physical parameters must be positive");
                }
                if (c.params.solver.rel_tol <= 0) {
                    throw std::invalid_argument("solver.rel_tol must be positive");
                }
                if (c.output.csv_stride < 1) {
                    throw std::invalid_argument("output.csv_stride must be >= 1");
                }
            }
        } catch (const std::invalid_argument& err) {
            fail(ln, err.what());
        }
    }

    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const char* preset_name(Preset preset) {
    switch (preset) {
        case Preset::manufactured: return "manufactured";
        case Preset::ellipse: return "ellipse";
        case Preset::square: return "square";
    }
    return "manufactured";
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    char buf[256];
    auto num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        out << buf;
    };
    out << "preset = " << preset_name(c.preset) << "\n";
    num("domain.x0", c.domain.x0);
    num("domain.x1", c.domain.x1);
    num("domain.y0", c.domain.y0);
    num("domain.y1", c.domain.y1);
    out << "nx = " << c.nx << "\n";
    out << "ny = " << c.ny << "\n";
    num("M", c.params.mobility);
    num("lambda", c.params.lambda);
    num("nu", c.params.nu);
    num("epsilon", c.params.epsilon);
    num("C0", c.params.C0);
    num("tau", c.params.tau);
    num("T", c.T);
    out << "lambda_on_fprime = " << (c.params.lambda_on_fprime ? "true" : "false") << "\n";
    num("body_force.x", c.body_force.x);
    num("body_force.y", c.body_force.y);
    out << "output.dir = " << c.output.dir << "\n";
    out << "output.snapshots = ";
    for (size_t i = 0; i < c.output.snapshots.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", c.output.snapshots[i]);
        out << buf;
    }
    out << "\n";
    out << "output.csv_stride = " << c.output.csv_stride << "\n";
    out << "solver.method = "
        << (c.params.solver.method == SolverMethod::cg ? "cg" : "bicgstab") << "\n";
    num("solver.rel_tol", c.params.solver.rel_tol);
    out << "solver.max_iters = " << c.params.solver.max_iters << "\n";
    return out.str();
}

double preset_phi0(Preset preset, double x, double y) {
    switch (preset) {
        case Preset::manufactured:
            return 2.0;
        case Preset::ellipse:
            return std::tanh(x * x / 0.01 + y * y / 0.0225 - 1.0);
        case Preset::square:
            return (x >= 0.25 && x <= 0.75 && y >= 0.25 && y <= 0.75) ? 1.0 : -1.0;
    }
    return 0.0;
}

} // namespace chns
