#pragma once

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "ldd/bridge/action_log.hpp"
#include "ldd/bridge/config.hpp"
#include "ldd/bridge/live.hpp"
#include "ldd/bridge/midi_in.hpp"
#include "ldd/bridge/osc_sender.hpp"
#include "ldd/bridge/replay.hpp"
#include "ldd/bridge/ws_server.hpp"

namespace ldd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

inline std::atomic<bool>& interrupted() {
    static std::atomic<bool> flag{false};
    return flag;
}

inline void on_sigint(int) { interrupted() = true; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline EngineConfig resolve_config(const std::string& config_path, std::optional<std::uint64_t> seed) {
    EngineConfig config = config_path.empty() ? EngineConfig{} : load_config(config_path);
    if (seed) config.seed = *seed;
    config.validate();
    return config;
}

struct GradSweep {
    std::size_t trials = 0;
    std::size_t failures = 0;
    double max_relative_error = 0.0;
};

/// Analytic vs central-difference gradients on `trials` random states per curve kind.
inline GradSweep gradient_sweep(std::size_t trials, std::uint64_t seed, double h = 1e-6) {
    GradSweep sweep;
    Rng rng(seed);
    for (CurveKind kind : {CurveKind::Cubic, CurveKind::Lissajous}) {
        for (std::size_t i = 0; i < trials; ++i) {
            const LearnState s = random_learn_state(kind, rng);
            const auto check = compare_gradients(loss(s).grad, finite_diff_gradient(s, h));
            ++sweep.trials;
            if (!check.ok) ++sweep.failures;
            sweep.max_relative_error = std::max(sweep.max_relative_error, check.max_relative_error);
        }
    }
    return sweep;
}

inline int cmd_replay(const std::string& script, const std::string& out_path, const std::string& config_path,
                      std::optional<std::uint64_t> seed, std::ostream& out) {
    const EngineConfig config = resolve_config(config_path, seed);
    const std::string text = read_file(script);
    std::ofstream log(out_path, std::ios::binary | std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write '" + out_path + "'");
    const ReplayStats stats = replay_script(text, config, log);
    log.close();
    if (!log) throw std::runtime_error("error writing '" + out_path + "'");
    out << "replayed " << stats.end_ms << " ms: " << stats.actions << " actions, " << stats.steps
        << " optimizer steps -> " << out_path << "\n";
    return kExitOk;
}

inline int cmd_check_grad(std::size_t trials, std::uint64_t seed, std::ostream& out) {
    const GradSweep sweep = gradient_sweep(trials, seed);
    out << "check-grad: " << sweep.trials << " states, " << sweep.failures
        << " failures, max relative error " << sweep.max_relative_error << "\n";
    return sweep.failures == 0 ? kExitOk : kExitRuntime;
}

struct PerformOptions {
    std::string midi_in;
    std::string script;
    std::string osc_dest;
    std::optional<unsigned short> ws_port;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string log_path;
    double publish_hz = kDefaultPublishHz;
};

inline int cmd_perform(const PerformOptions& opt, std::ostream& out) {
    const EngineConfig config = resolve_config(opt.config_path, opt.seed);
    std::optional<std::vector<ScriptedEvent>> script;
    if (!opt.script.empty()) script = parse_script(read_file(opt.script));

    MonotonicClock clock;
    LiveEngine engine(config, clock, opt.publish_hz);

    std::unique_ptr<StateServer> server;
    if (opt.ws_port) {
        server = std::make_unique<StateServer>(*opt.ws_port, clock,
                                               [&engine](EngineInput in) { engine.queue().push(std::move(in)); });
        out << "websocket: listening on port " << server->port() << "\n" << std::flush;
        engine.add_snapshot_sink([s = server.get()](const StateSnapshot& snap) { s->publish(snapshot_json(snap)); });
    }

    std::unique_ptr<OscSender> osc;
    if (!opt.osc_dest.empty()) {
        osc = std::make_unique<OscSender>(parse_host_port(opt.osc_dest));
        engine.add_snapshot_sink([o = osc.get()](const StateSnapshot& snap) { o->send(encode_osc(snap)); });
    }

    std::ofstream log;
    if (!opt.log_path.empty()) {
        log.open(opt.log_path, std::ios::binary | std::ios::trunc);
        if (!log) throw std::runtime_error("cannot write '" + opt.log_path + "'");
        engine.add_action_sink([&log](double t, PerformancePart part, const Action& a) {
            log << action_json(t, part, a) << '\n';
        });
    }

    std::unique_ptr<MidiInput> midi;
    std::jthread source;
    if (script) {
        source = std::jthread([player = ScriptPlayer(std::move(*script), clock, engine.queue())](
                                  std::stop_token st) mutable { player.run(st); });
    } else {
        midi = std::make_unique<MidiInput>(opt.midi_in, clock, engine.queue());
        source = std::jthread([m = midi.get()](std::stop_token st) { m->run(st); });
    }

    interrupted() = false;
    auto previous = std::signal(SIGINT, on_sigint);
    engine.run(&interrupted());
    std::signal(SIGINT, previous);

    source.request_stop();
    if (source.joinable()) source.join();
    if (server) server->stop();
    out << "perform: " << engine.state().total_steps << " optimizer steps, " << engine.publishes()
        << " snapshots published\n";
    return kExitOk;
}

}  // namespace cli_detail

/// Entry point behind the `ldd` executable. Usage errors return 2, runtime
/// failures 1.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"ldd: gradient descent on parametric curves, steered by note events"};
    app.require_subcommand(1);

    auto* perform = app.add_subcommand("perform", "run live from a MIDI input or a scripted event file");
    cli_detail::PerformOptions popt;
    auto* midi_opt = perform->add_option("--midi-in", popt.midi_in, "raw MIDI device (path or name under /dev/snd)");
    auto* script_opt = perform->add_option("--script", popt.script, "scripted event file played in real time");
    midi_opt->excludes(script_opt);
    perform->add_option("--osc-dest", popt.osc_dest, "send OSC telemetry to host:port");
    perform->add_option("--ws-port", popt.ws_port, "serve WebSocket state stream on this port");
    perform->add_option("--seed", popt.seed, "random seed (overrides config)");
    perform->add_option("--config", popt.config_path, "key = value config file");
    perform->add_option("--log", popt.log_path, "also write the action log as JSON lines");
    perform->add_option("--publish-hz", popt.publish_hz, "snapshot publish rate")->check(CLI::PositiveNumber);

    auto* replay_cmd = app.add_subcommand("replay", "headless deterministic run of a script");
    std::string r_script, r_out, r_config;
    std::optional<std::uint64_t> r_seed;
    replay_cmd->add_option("--script", r_script, "scripted event file")->required();
    replay_cmd->add_option("--out", r_out, "action log output (JSON lines)")->required();
    replay_cmd->add_option("--seed", r_seed, "random seed (overrides config)");
    replay_cmd->add_option("--config", r_config, "key = value config file");

    auto* check = app.add_subcommand("check-grad", "verify analytic gradients against finite differences");
    std::size_t trials = 100;
    std::uint64_t check_seed = 2024;
    check->add_option("--trials", trials, "random states per curve kind")->check(CLI::PositiveNumber);
    check->add_option("--seed", check_seed, "random seed for the sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*perform) {
            if (popt.midi_in.empty() == popt.script.empty()) {
                err << "error: perform needs exactly one of --midi-in or --script\n";
                return kExitUsage;
            }
            return cli_detail::cmd_perform(popt, out);
        }
        if (*replay_cmd) return cli_detail::cmd_replay(r_script, r_out, r_config, r_seed, out);
        if (*check) return cli_detail::cmd_check_grad(trials, check_seed, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace ldd
