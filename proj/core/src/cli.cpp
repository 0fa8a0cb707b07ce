#include "storetwin/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <pthread.h>

#include "storetwin/calibrate.hpp"
#include "storetwin/compare.hpp"
#include "storetwin/error.hpp"
#include "storetwin/mqtt/broker.hpp"
#include "storetwin/runner.hpp"
#include "storetwin/scenario.hpp"

namespace storetwin {

namespace fs = std::filesystem;

namespace {

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw ValidationError("broker address must be HOST:PORT (got '" + text + "')");
    const std::string port_text = text.substr(colon + 1);
    unsigned long port = 0;
    std::size_t used = 0;
    try {
        port = std::stoul(port_text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != port_text.size() || port == 0 || port > 65535)
        throw ValidationError("bad port in broker address '" + text + "'");
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::optional<fs::path> optional_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

int cmd_run(const std::string& file, const std::string& out_dir, const std::string& mqtt,
            const std::string& calibration, std::ostream& out) {
    auto scenario = harness::load_scenario(file, optional_path(calibration));
    harness::RunOptions opts;
    if (!mqtt.empty()) {
        opts.mqtt_endpoint = parse_endpoint(mqtt);
    } else if (scenario.telemetry.enabled) {
        if (const char* env = std::getenv("STORETWIN_MQTT"); env && *env)
            opts.mqtt_endpoint = parse_endpoint(env);
    }

    const auto result = harness::run_scenario(scenario, opts);

    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);
    const fs::path csv = dir / (scenario.id + ".csv");
    {
        std::ofstream f(csv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + csv.string());
        harness::write_csv(result.log, f);
        if (!f) throw std::runtime_error("write failed: " + csv.string());
    }
    const std::string text = harness::report_to_text(result.report);
    write_file(dir / (scenario.id + ".report.json"), harness::report_to_json(result.report) + "\n");
    write_file(dir / (scenario.id + ".report.txt"), text);
    out << text << "wrote " << csv.string() << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& file, const std::string& calibration, bool json,
                std::ostream& out) {
    const auto scenario = harness::load_scenario(file, optional_path(calibration));
    const auto cmp = harness::run_comparison(scenario);
    out << (json ? harness::comparison_to_json(cmp) + "\n" : harness::comparison_to_text(cmp));
    return kExitOk;
}

int cmd_calibrate(const std::string& file, double low, double high, const std::string& sidecar,
                  std::ostream& out) {
    auto scenario = harness::load_scenario(file);
    scenario.controller_enabled = false;
    const auto res = harness::calibrate_rot_rate(scenario, low, high);

    fs::path target = sidecar.empty() ? fs::path(file).replace_extension(".calibration.json")
                                      : fs::path(sidecar);
    nlohmann::ordered_json j;
    j["spoilage"]["rot_pct_per_day"] = res.rot_pct_per_day;
    write_file(target, j.dump(2) + "\n");
    out << fmt::format("rot_pct_per_day {} -> total spoilage {:.3f} % ({} iterations)\n",
                       res.rot_pct_per_day, res.total_spoilage_pct, res.iterations)
        << "wrote " << target.string() << "\n";
    return kExitOk;
}

int cmd_broker(const std::string& bind, std::uint16_t port, std::ostream& out) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    mqtt::BrokerOptions opts;
    opts.bind_address = bind;
    opts.port = port;
    mqtt::Broker broker(opts);
    broker.start();
    out << "broker listening on " << bind << ":" << broker.port() << std::endl;

    int sig = 0;
    sigwait(&set, &sig);
    broker.stop();
    const auto st = broker.stats();
    out << fmt::format("stopped: {} connections, {} publishes, {} delivered, {} dropped\n",
                       st.connections_accepted, st.publishes_received, st.messages_delivered,
                       st.messages_dropped);
    pthread_sigmask(SIG_UNBLOCK, &set, nullptr);
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Onion storage digital twin: scenario runner, comparison, calibration, MQTT broker",
                 "storetwin"};
    app.require_subcommand(1);

    std::string file, out_dir, mqtt, calibration, sidecar, bind = "127.0.0.1";
    bool json = false;
    double low = 40.0, high = 45.0;
    std::uint16_t port = 1883;

    auto* run = app.add_subcommand("run", "Run a scenario, write CSV and report");
    run->add_option("scenario", file, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory (default: current)");
    run->add_option("--mqtt", mqtt, "Publish telemetry to HOST:PORT");
    run->add_option("--calibration", calibration, "Calibration sidecar to overlay");

    auto* cmp = app.add_subcommand("compare", "Run baseline and controlled variants and compare");
    cmp->add_option("scenario", file, "Scenario JSON file")->required();
    cmp->add_option("--calibration", calibration, "Calibration sidecar to overlay");
    cmp->add_flag("--json", json, "Print the comparison as JSON");

    auto* brk = app.add_subcommand("broker", "Run a standalone MQTT broker");
    brk->add_option("--port", port, "TCP port (0 for ephemeral)");
    brk->add_option("--bind", bind, "Bind address");

    auto* cal = app.add_subcommand("calibrate", "Bisect rot_pct_per_day into a spoilage band");
    cal->add_option("scenario", file, "Scenario JSON file")->required();
    cal->add_option("--target-low", low, "Lower bound of the band (%)");
    cal->add_option("--target-high", high, "Upper bound of the band (%)");
    cal->add_option("--sidecar", sidecar, "Output file (default: <scenario>.calibration.json)");

    std::vector<const char*> argv;
    argv.push_back("storetwin");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(file, out_dir, mqtt, calibration, out);
        if (cmp->parsed()) return cmd_compare(file, calibration, json, out);
        if (cal->parsed()) return cmd_calibrate(file, low, high, sidecar, out);
        if (brk->parsed()) return cmd_broker(bind, port, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace storetwin
