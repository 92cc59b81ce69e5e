#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace aporia::cli {

struct RunProtocolArgs {
    std::filesystem::path fixture;
    std::optional<std::string> distance;
    std::optional<std::string> theory;
    std::optional<std::filesystem::path> taxonomy;
    std::optional<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> transcript_out;
    bool json = false;
};

struct TimingReportArgs {
    std::filesystem::path dir;
    bool json = false;
};

struct TrustReplayArgs {
    std::filesystem::path log_dir;
    std::string policy;
    bool json = false;
};

struct PoetServeArgs {
    std::optional<std::string> address;
    bool stdio = false;
    std::vector<std::filesystem::path> agents;
    std::optional<std::filesystem::path> taxonomy;
    std::optional<std::filesystem::path> export_dir;
    bool json = false;
};

struct ExportArgs {
    std::string session_id;
    std::filesystem::path dir = "exports";
    bool json = false;
};

int run_protocol(const RunProtocolArgs& args, std::ostream& out);
int timing_report(const TimingReportArgs& args, std::ostream& out);
int trust_replay(const TrustReplayArgs& args, std::ostream& out);
int poet_serve(const PoetServeArgs& args, std::ostream& out);
int export_session(const ExportArgs& args, std::ostream& out);

}  // namespace aporia::cli
