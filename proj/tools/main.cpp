#include "commands.hpp"

#include <aporia/error.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace aporia::cli;

    CLI::App app{"aporia protocol workbench", "aporia"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "aporia 0.1.0");

    RunProtocolArgs run;
    auto* run_cmd = app.add_subcommand("run-protocol", "Run a fixture protocol and report pi and emotion");
    run_cmd->add_option("fixture", run.fixture, "Fixture directory or protocol.json")->required();
    run_cmd->add_option("--distance", run.distance, "numeric_abs | numeric_rel | token_similarity | theory_cost");
    run_cmd->add_option("--theory", run.theory, "Theory id for --distance theory_cost");
    run_cmd->add_option("--taxonomy", run.taxonomy, "Taxonomy JSON file");
    run_cmd->add_option("--lexicon", run.lexicon, "Tone lexicon for fixtures without their own");
    run_cmd->add_option("--transcript", run.transcript_out, "Write the NDJSON transcript here");
    run_cmd->add_flag("--json", run.json, "Machine-readable output");

    TimingReportArgs timing;
    auto* timing_cmd = app.add_subcommand("timing-report", "Tabulate timeline CSVs and their average steps");
    timing_cmd->add_option("dir", timing.dir, "Directory of event,time_s CSV files")->required();
    timing_cmd->add_flag("--json", timing.json, "Machine-readable output");

    TrustReplayArgs trust;
    auto* trust_cmd = app.add_subcommand("trust-replay", "Replay emotion event logs and select a service");
    trust_cmd->add_option("log_dir", trust.log_dir, "Directory of <service>.ndjson logs")->required();
    trust_cmd->add_option("--policy", trust.policy, "Policy expression, e.g. \"happy(Money) and not bored(Time)\"")
        ->required();
    trust_cmd->add_flag("--json", trust.json, "Machine-readable output");

    PoetServeArgs serve;
    auto* serve_cmd = app.add_subcommand("poet-serve", "Serve the PoET wire protocol");
    serve_cmd->add_option("address", serve.address, "host:port to bind");
    serve_cmd->add_flag("--stdio", serve.stdio, "Speak the protocol on standard input/output");
    serve_cmd->add_option("--agent", serve.agents, "Aporia fixture backing a scripted agent (repeatable)")
        ->required();
    serve_cmd->add_option("--taxonomy", serve.taxonomy, "Taxonomy JSON file");
    serve_cmd->add_option("--export-dir", serve.export_dir, "Write closed sessions here");
    serve_cmd->add_flag("--json", serve.json, "Machine-readable output");

    ExportArgs exp;
    auto* export_cmd = app.add_subcommand("export", "Print an exported PoET session");
    export_cmd->add_option("session", exp.session_id, "Session id, e.g. s1")->required();
    export_cmd->add_option("--dir", exp.dir, "Export directory of poet-serve");
    export_cmd->add_flag("--json", exp.json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) return run_protocol(run, std::cout);
        if (timing_cmd->parsed()) return timing_report(timing, std::cout);
        if (trust_cmd->parsed()) return trust_replay(trust, std::cout);
        if (serve_cmd->parsed()) return poet_serve(serve, std::cout);
        return export_session(exp, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "aporia: error: " << e.what() << '\n';
        return 1;
    }
}
