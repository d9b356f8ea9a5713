#include "chns/driver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "chns/vtk.hpp"

namespace chns {

namespace {

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void append_csv_row(std::string& csv, int step, double time, const EnergyReport& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  step, time, r.E_modified, r.E_theorem, r.dissipation_bound, r.mass,
                  r.rho, r.sav_ratio);
    csv += buf;
}

} // namespace

int cmd_run(const RunConfig& config, std::ostream& log, std::ostream& err) {
    try {
        config.validate();
        std::filesystem::create_directories(config.output.dir);

        const Mesh mesh = Mesh::rectangle(config.domain, config.nx, config.ny);
        const Scheme scheme(mesh, config.params);
        const ManufacturedSolution ms(config.params);
        const bool forced = config.preset == Preset::manufactured;
        const bool has_body_force = config.body_force.x != 0.0 || config.body_force.y != 0.0;

        const Field phi0 = interpolate(mesh, scheme.p1(), [&](double x, double y) {
            return preset_phi0(config.preset, x, y);
        });
        const Field u0(scheme.p2v());
        State state = scheme.initial_state(phi0, u0);

        const double tau = config.params.tau;
        const int steps = static_cast<int>(std::floor(config.T / tau + 1e-9));

        // Snapshot times resolved to step indices.
        std::map<int, int> snapshot_steps; // step -> snapshot ordinal
        for (size_t i = 0; i < config.output.snapshots.size(); ++i) {
            const int s = static_cast<int>(std::llround(config.output.snapshots[i] / tau));
            snapshot_steps.emplace(std::min(std::max(s, 0), steps), static_cast<int>(i));
        }
        auto snapshot = [&](int step) {
            const auto it = snapshot_steps.find(step);
            if (it == snapshot_steps.end()) return;
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%02d.vtk", it->second);
            write_vtk(mesh,
                      {{"phi", &state.phi}, {"mu", &state.mu}, {"p", &state.p},
                       {"u", &state.u}},
                      (std::filesystem::path(config.output.dir) / name).string());
        };

        std::string csv = "step,time,E_modified,E_theorem,dissipation_bound,mass,rho,sav_ratio\n";
        append_csv_row(csv, 0, 0.0, scheme.energy_report(state));
        snapshot(0);

        const std::string csv_path =
            (std::filesystem::path(config.output.dir) / "energy.csv").string();
        int status = 0;
        try {
            for (int n = 1; n <= steps; ++n) {
                std::optional<SourceTerms> sources;
                if (forced || has_body_force) {
                    SourceTerms s;
                    const double t_next = state.t + tau;
                    if (forced) {
                        s.f_phi = [&ms, t_next](double x, double y) {
                            return ms.f_phi(x, y, t_next);
                        };
                    }
                    const Vec2 bf = config.body_force;
                    if (forced) {
                        s.f_u = [&ms, bf, t_next](double x, double y) {
                            const Vec2 f = ms.f_u(x, y, t_next);
                            return Vec2{f.x + bf.x, f.y + bf.y};
                        };
                    } else if (has_body_force) {
                        s.f_u = [bf](double, double) { return bf; };
                    }
                    sources = std::move(s);
                }
                auto [next, report] = scheme.advance(state, sources);
                state = std::move(next);
                if (n % config.output.csv_stride == 0 || n == steps) {
                    append_csv_row(csv, n, state.t, report);
                }
                snapshot(n);
            }
        } catch (const std::exception& e) {
            err << "chns run: step failed: " << e.what() << "\n";
            status = 1;
        }
        write_text_atomic(csv_path, csv);
        if (status == 0) {
            log << "wrote " << csv_path << " (" << steps << " steps)\n";
        }
        return status;
    } catch (const std::exception& e) {
        err << "chns run: " << e.what() << "\n";
        return 1;
    }
}

int cmd_converge(const RunConfig& config, const std::vector<int>& n_list,
                 std::ostream& log, std::ostream& err) {
    try {
        config.validate();
        if (config.preset != Preset::manufactured) {
            err << "chns converge: requires preset = manufactured\n";
            return 1;
        }
        const RateTable table = convergence_study(n_list, config.params, config.T);
        log << format_rate_table(table);
        std::filesystem::create_directories(config.output.dir);
        write_text_atomic(
            (std::filesystem::path(config.output.dir) / "rates.csv").string(),
            rate_table_csv(table));
        if (!table.error.empty()) {
            err << "chns converge: aborted after " << table.completed()
                << " resolutions: " << table.error << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "chns converge: " << e.what() << "\n";
        return 1;
    }
}

} // namespace chns
