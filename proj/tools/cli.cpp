// Copyright 2026 The pulsestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pulsestack/driver.hpp"
#include "pulsestack/error.hpp"
#include "pulsestack/lowering.hpp"
#include "pulsestack/passes.hpp"
#include "pulsestack/pqir.hpp"
#include "pulsestack/vqe.hpp"

namespace pulsestack::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

std::string number(double v) { return qdmi::format_value(v); }

// A --device value is a registered device name or a descriptor file path.
qdmi::DeviceHandle resolve_device(qdmi::Driver& driver, qdmi::SessionHandle session, const std::string& name_or_path) {
    for (const auto& [handle, name] : driver.list_devices(session)) {
        if (name == name_or_path) return handle;
    }
    std::error_code ec;
    if (std::filesystem::is_regular_file(name_or_path, ec)) return driver.register_device(load_device_file(name_or_path));
    fail(ErrorCode::InvalidDevice, "unknown device '" + name_or_path + "' (not registered and not a descriptor file)");
}

void print_diagnostics(const Diagnostics& diagnostics, std::ostream& err) {
    for (const auto& d : diagnostics) err << format(d) << '\n';
}

// --- plot ---------------------------------------------------------------------

std::string svg_plot(const Schedule& timed) {
    std::vector<FrameId> lanes;
    for (const auto& instruction : timed.instructions) {
        for (const auto& f : frames_of(instruction)) {
            if (std::find(lanes.begin(), lanes.end(), f) == lanes.end()) lanes.push_back(f);
        }
    }
    std::int64_t end = 1;
    for (std::size_t i = 0; i < timed.instructions.size(); ++i) {
        end = std::max(end, (*timed.timing)[i] + instruction_duration(timed.instructions[i]));
    }
    constexpr double kLeft = 90, kWidth = 900, kLane = 70, kTop = 20;
    const double height = kTop * 2 + kLane * static_cast<double>(std::max<std::size_t>(lanes.size(), 1));
    auto x_of = [&](double sample) { return kLeft + kWidth * sample / static_cast<double>(end); };
    auto lane_y = [&](const FrameId& f) {
        const auto k = std::find(lanes.begin(), lanes.end(), f) - lanes.begin();
        return kTop + kLane * (static_cast<double>(k) + 0.5);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLeft + kWidth + 20 << "\" height=\"" << height
       << "\" font-family=\"monospace\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& f : lanes) {
        const double y = lane_y(f);
        os << "<text x=\"4\" y=\"" << y + 4 << "\">" << f.value() << "</text>\n";
        os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + kWidth << "\" y2=\"" << y
           << "\" stroke=\"#bbb\"/>\n";
    }
    for (std::size_t i = 0; i < timed.instructions.size(); ++i) {
        const auto& instruction = timed.instructions[i];
        const double start = static_cast<double>((*timed.timing)[i]);
        if (const auto* play = std::get_if<instr::Play>(&instruction)) {
            const double y = lane_y(play->frame);
            const auto samples = waveform_samples(play->waveform);
            os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" points=\"";
            for (std::size_t n = 0; n < samples.size(); ++n) {
                os << x_of(start + static_cast<double>(n)) << ',' << y - 0.4 * kLane * std::abs(samples[n]) << ' ';
            }
            os << x_of(start + static_cast<double>(samples.size())) << ',' << y << "\"/>\n";
        } else if (const auto* delay = std::get_if<instr::Delay>(&instruction)) {
            const double y = lane_y(delay->frame);
            os << "<line x1=\"" << x_of(start) << "\" y1=\"" << y << "\" x2=\""
               << x_of(start + static_cast<double>(delay->duration_samples)) << "\" y2=\"" << y
               << "\" stroke=\"#999\" stroke-width=\"3\" stroke-dasharray=\"4 3\"/>\n";
        } else if (std::holds_alternative<instr::Measure>(instruction)) {
            os << "<line x1=\"" << x_of(start) << "\" y1=\"" << kTop << "\" x2=\"" << x_of(start) << "\" y2=\""
               << height - kTop << "\" stroke=\"#b03030\"/>\n";
        } else {
            for (const auto& f : frames_of(instruction)) {
                const double y = lane_y(f);
                os << "<line x1=\"" << x_of(start) << "\" y1=\"" << y - 8 << "\" x2=\"" << x_of(start) << "\" y2=\""
                   << y + 8 << "\" stroke=\"#2a8a2a\"/>\n";
            }
        }
    }
    os << "<text x=\"" << kLeft << "\" y=\"" << height - 4 << "\">0</text>\n";
    os << "<text x=\"" << kLeft + kWidth - 60 << "\" y=\"" << height - 4 << "\">" << end << " samples</text>\n";
    os << "</svg>\n";
    return os.str();
}

// --- subcommands --------------------------------------------------------------

struct QueryArgs {
    std::string device;
    std::string key;
    bool all = false;
    std::optional<std::uint32_t> site;
    std::optional<std::string> port;
    std::optional<std::string> operation;
};

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
    auto driver = qdmi::Driver::from_env();
    const auto session = driver->open();
    const auto device = resolve_device(*driver, session, a.device);

    qdmi::QueryScope scope;
    if (a.site) {
        scope = qdmi::QueryScope::of_site(SiteId{*a.site});
    } else if (a.port) {
        scope = qdmi::QueryScope::of_port(PortId{*a.port});
    } else if (a.operation) {
        scope = qdmi::QueryScope::of_operation(*a.operation);
    }

    if (!a.all) {
        if (a.key.empty()) {
            err << "query needs --key or --all\n";
            return kExitUsage;
        }
        const auto key = qdmi::parse_property_key(a.key);
        const auto value = qdmi::format_value(driver->query(device, scope, key));
        out << a.key << " = " << value << '\n';
        return kExitOk;
    }

    const auto d = driver->descriptor(device);
    auto dump = [&](const qdmi::QueryScope& s, const std::string& label) {
        for (auto key : qdmi::all_property_keys()) {
            if (qdmi::scope_of(key) != s.kind) continue;
            try {
                const auto value = qdmi::format_value(driver->query(device, s, key));
                out << label << qdmi::to_string(key) << " = " << value << '\n';
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NotSupported) throw;
            }
        }
    };
    dump(qdmi::QueryScope::device(), "");
    for (std::uint32_t s = 0; s < d.num_sites; ++s) {
        dump(qdmi::QueryScope::of_site(SiteId{s}), "site[" + std::to_string(s) + "].");
    }
    if (d.pulse_support == PulseSupport::port_level) {
        for (const auto& p : d.ports) dump(qdmi::QueryScope::of_port(p.id), "port[" + p.id.value() + "].");
    }
    std::set<std::string> operations(d.operations.begin(), d.operations.end());
    const auto registry = effective_calibrations(d);
    for (const auto& e : registry.entries()) operations.insert(e.gate);
    for (const auto& op : operations) dump(qdmi::QueryScope::of_operation(op), "operation[" + op + "].");
    return kExitOk;
}

struct CompileArgs {
    std::string circuit;
    std::string calibrations;
    std::string device;
    std::string passes = "fold_phase,merge_delays,legalize,verify";
    std::string mode = "pad";
    std::string out;
    std::string plot;
    std::string module_name;
};

int cmd_compile(const CompileArgs& a, std::ostream& out, std::ostream& err) {
    auto driver = qdmi::Driver::from_env();
    const auto session = driver->open();
    const auto device = driver->descriptor(resolve_device(*driver, session, a.device));

    const auto circuit = parse_circuit_json(read_file(a.circuit));
    CalibrationRegistry extra;
    if (!a.calibrations.empty()) extra = parse_calibrations_json(read_file(a.calibrations));
    const auto schedule = lower(circuit, effective_calibrations(device, extra), device);

    const auto config = passes::parse_pipeline(a.passes, passes::parse_legalize_mode(a.mode));
    auto result = passes::run_pipeline(schedule, config, device);
    print_diagnostics(result.diagnostics, err);
    if (has_errors(result.diagnostics)) return kExitDiagnostics;

    pqir::ModuleOptions options;
    options.module_name = a.module_name;
    if (options.module_name.empty()) {
        options.module_name = a.out.empty() ? std::filesystem::path(a.circuit).stem().string()
                                            : std::filesystem::path(a.out).stem().string();
    }
    options.num_qubits = circuit.num_sites;
    const auto text = pqir::emit(pqir::build_module(result.schedule, options));
    if (a.out.empty()) {
        out << text;
    } else {
        write_file(a.out, text);
    }
    if (!a.plot.empty()) {
        const auto timed = result.schedule.is_timed() ? result.schedule : passes::resolve_timing(result.schedule);
        write_file(a.plot, svg_plot(timed));
    }
    return kExitOk;
}

struct ValidateArgs {
    std::string input;
    std::string device;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    auto parsed = pqir::parse(read_file(a.input));
    auto diagnostics = parsed.diagnostics;
    const auto findings = pqir::validate_profile(parsed.module);
    diagnostics.insert(diagnostics.end(), findings.begin(), findings.end());
    if (!a.device.empty() && !has_errors(diagnostics)) {
        auto driver = qdmi::Driver::from_env();
        const auto session = driver->open();
        const auto device = driver->descriptor(resolve_device(*driver, session, a.device));
        const auto legal = passes::legalize(parsed.module.schedule, device, passes::LegalizeMode::strict);
        diagnostics.insert(diagnostics.end(), legal.diagnostics.begin(), legal.diagnostics.end());
    }
    print_diagnostics(diagnostics, err);
    if (has_errors(diagnostics)) return kExitDiagnostics;
    const auto& attrs = parsed.module.attributes;
    out << a.input << ": valid, " << parsed.module.schedule.instructions.size() << " instructions, "
        << attrs.required_num_ports << " ports, " << attrs.required_num_qubits << " qubits, "
        << attrs.required_num_results << " results\n";
    return kExitOk;
}

struct RunArgs {
    std::string input;
    std::string device;
    std::uint64_t shots = 1000;
    std::uint64_t seed = 0;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream&) {
    auto driver = qdmi::Driver::from_env();
    const auto session = driver->open();
    const auto device = resolve_device(*driver, session, a.device);
    const auto job = driver->submit_job(session, device, qdmi::kPqirPulseFormat, read_file(a.input), a.shots, a.seed);
    const auto histogram = driver->job_result(job);
    for (const auto& [bits, count] : histogram.counts) out << bits << ' ' << count << '\n';
    driver->close(session);
    return kExitOk;
}

struct VqeArgs {
    std::string device;
    std::size_t iterations = 200;
    std::uint64_t seed = 1;
    std::uint32_t site = 0;
};

int cmd_vqe(const VqeArgs& a, std::ostream& out, std::ostream&) {
    auto driver = qdmi::Driver::from_env();
    const auto session = driver->open();
    const auto device = driver->descriptor(resolve_device(*driver, session, a.device));
    if (!device.simulation) fail(ErrorCode::NotSupported, "device '" + device.name + "' is not a simulator");

    vqe::Options options;
    options.iterations = a.iterations;
    options.seed = a.seed;
    options.site = SiteId{a.site};
    out << "# iteration energy amp duration_samples phase_rad\n";
    const auto result = vqe::run(device, options, [&](const vqe::IterationRecord& r) {
        out << r.iteration << ' ' << number(r.energy) << ' ' << number(r.parameters.amp) << ' '
            << r.parameters.duration_samples << ' ' << number(r.parameters.phase_rad) << '\n';
    });
    out << "final_energy = " << number(result.energy) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-level compilation, exchange and simulation toolchain", "pulsestack"};
    app.require_subcommand(1);

    QueryArgs q;
    auto* query = app.add_subcommand("query", "Print device properties as `key = value` lines");
    query->add_option("--device", q.device, "Registered device name or descriptor file")->required();
    query->add_option("--key", q.key, "Property key");
    query->add_flag("--all", q.all, "Dump every property the device reports");
    auto* site_opt = query->add_option("--site", q.site, "Site scope");
    auto* port_opt = query->add_option("--port", q.port, "Port scope");
    auto* op_opt = query->add_option("--operation", q.operation, "Operation scope");
    site_opt->excludes(port_opt)->excludes(op_opt);
    port_opt->excludes(op_opt);

    CompileArgs c;
    auto* compile = app.add_subcommand("compile", "Lower a circuit, run passes and emit a .pqir module");
    compile->add_option("--circuit", c.circuit, "Circuit JSON")->required();
    compile->add_option("--calibrations", c.calibrations, "Calibration JSON");
    compile->add_option("--device", c.device, "Registered device name or descriptor file")->required();
    compile->add_option("--passes", c.passes, "Comma-separated pass list")->capture_default_str();
    compile->add_option("--mode", c.mode, "Legalization mode")
        ->check(CLI::IsMember({"strict", "pad"}))
        ->capture_default_str();
    compile->add_option("--out,-o", c.out, "Output file (default: standard output)");
    compile->add_option("--plot", c.plot, "Write an SVG timing plot");
    compile->add_option("--name", c.module_name, "Module name");

    ValidateArgs v;
    auto* validate = app.add_subcommand("validate", "Parse and check a .pqir module");
    validate->add_option("input", v.input, ".pqir file")->required();
    validate->add_option("--device", v.device, "Also check against a device's constraints");

    RunArgs r;
    auto* run = app.add_subcommand("run", "Submit a .pqir module and print the histogram");
    run->add_option("input", r.input, ".pqir file")->required();
    run->add_option("--device", r.device, "Registered device name or descriptor file")->required();
    run->add_option("--shots", r.shots, "Shots")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--seed", r.seed, "Sampling seed")->capture_default_str();

    VqeArgs w;
    auto* vqe_cmd = app.add_subcommand("vqe-demo", "Optimize a drive pulse to minimize <sz>");
    vqe_cmd->add_option("--device", w.device, "Simulator device name or descriptor file")->required();
    vqe_cmd->add_option("--iterations", w.iterations, "Iteration budget")->capture_default_str();
    vqe_cmd->add_option("--seed", w.seed, "Seed for the starting point")->capture_default_str();
    vqe_cmd->add_option("--site", w.site, "Site to optimize")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*query) return cmd_query(q, out, err);
        if (*compile) return cmd_compile(c, out, err);
        if (*validate) return cmd_validate(v, out, err);
        if (*run) return cmd_run(r, out, err);
        if (*vqe_cmd) return cmd_vqe(w, out, err);
    } catch (const qdmi::DiagnosticsError& e) {
        err << "error: " << e.what() << '\n';
        print_diagnostics(e.diagnostics(), err);
        return kExitDiagnostics;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiagnostics;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiagnostics;
    }
    return kExitUsage;
}

}  // namespace pulsestack::cli
