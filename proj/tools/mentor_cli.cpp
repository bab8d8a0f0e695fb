// mentor: command-line front end for the interview engine.
//
//   mentor serve  --port 8080 --data ./sessions
//   mentor repl
//   mentor eval   --corpus data/seed_corpus.jsonl --folds 5
//   mentor demo   --script data/uber_script.jsonl
//   mentor export --session ID --format dot --data ./sessions

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mentor/dialogue.hpp"
#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"
#include "mentor/nlu/corpus.hpp"
#include "mentor/nlu/evaluate.hpp"
#include "mentor/service/http_server.hpp"
#include "mentor/service/mentor_service.hpp"

#ifndef MENTOR_SEED_CORPUS
#define MENTOR_SEED_CORPUS "data/seed_corpus.jsonl"
#endif

namespace {

std::string env_or(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

std::shared_ptr<const mentor::nlu::ClassifierModel> load_model(const std::string& corpus_path)
{
    return std::make_shared<const mentor::nlu::ClassifierModel>(
        mentor::nlu::train(mentor::nlu::load_corpus(corpus_path)));
}

/// Script files are JSON Lines of {"text": ...}; plain text lines are
/// accepted too.
std::vector<std::string> read_script(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open script '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.front() == '{') {
            auto j = nlohmann::json::parse(line);
            lines.push_back(j.at("text").get<std::string>());
        } else {
            if (line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    return lines;
}

void print_bot(const std::vector<std::string>& replies)
{
    for (const auto& r : replies) std::cout << "bot> " << r << "\n";
}

// Set from the signal handler; a watcher thread does the actual shutdown
// because stop() is a no-op until the server has entered its accept loop.
volatile std::sig_atomic_t stop_requested = 0;

void on_signal(int) { stop_requested = 1; }

struct EngineFlags {
    std::string corpus = env_or("MENTOR_CORPUS", MENTOR_SEED_CORPUS);
    std::size_t max_rounds = 5;
    double clarification = mentor::nlu::default_clarification_threshold;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--corpus", corpus, "Training corpus (JSON Lines)")->capture_default_str();
        cmd->add_option("--max-refinement-rounds", max_rounds, "Refinement depth cap")
            ->capture_default_str();
        cmd->add_option("--clarification-threshold", clarification,
                        "Ask for clarification below this confidence")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    }

    mentor::EngineConfig config() const { return {max_rounds, clarification}; }
};

int run_serve(const EngineFlags& flags, const std::string& host, int port, const std::string& data,
              const std::string& ui)
{
    mentor::service::MentorService service(load_model(flags.corpus),
                                           {data, flags.config(), nullptr});
    mentor::service::HttpServer server(service, ui);
    const int bound = server.bind(host, port);
    if (bound < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::atomic<bool> finished{false};
    std::thread watcher([&] {
        while (!finished) {
            if (stop_requested && server.running()) {
                server.stop();
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    });
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    server.serve();
    finished = true;
    watcher.join();
    return 0;
}

int run_repl(const EngineFlags& flags, bool print_map)
{
    mentor::DialogueEngine engine(load_model(flags.corpus));
    auto session = engine.new_session(flags.config());
    print_bot(mentor::DialogueEngine::opening_lines());
    std::string line;
    while (!session.done()) {
        std::cout << "you> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        print_bot(engine.handle(session, line).replies);
    }
    if (print_map) std::cout << mentor::to_json(session.map) << "\n";
    return 0;
}

int run_eval(const std::string& corpus_path, std::size_t folds, double threshold,
             double clarification, bool as_json)
{
    const auto corpus = mentor::nlu::load_corpus(corpus_path);
    const auto m = mentor::nlu::evaluate(corpus, folds, clarification);
    if (as_json) {
        std::cout << mentor::nlu::metrics_to_json(m).dump(2) << "\n";
    } else {
        std::cout << "utterances:          " << m.total << "\n"
                  << "folds:               " << folds << "\n"
                  << "accuracy:            " << m.accuracy << " (" << m.correct << "/" << m.total << ")\n"
                  << "macro-F1:            " << m.macro_f1 << "\n"
                  << "clause exact-match:  " << m.clause_exact_match << " (" << m.clause_matches
                  << "/" << m.clause_total << ")\n\n"
                  << "confusion matrix\n"
                  << mentor::nlu::confusion_table(m);
    }
    if (m.accuracy < threshold) {
        std::cerr << "accuracy " << m.accuracy << " is below the threshold " << threshold << "\n";
        return 1;
    }
    return 0;
}

int run_demo(const EngineFlags& flags, const std::string& script, const std::string& format)
{
    mentor::DialogueEngine engine(load_model(flags.corpus));
    const std::string stamp = "2020-01-01T00:00:00.000Z";
    auto session = engine.new_session(flags.config(), "demo", stamp);
    const bool text = format == "text";
    if (text) print_bot(mentor::DialogueEngine::opening_lines());
    for (const auto& utterance : read_script(script)) {
        if (session.done()) break;
        if (text) std::cout << "you> " << utterance << "\n";
        const auto turn = engine.handle(session, utterance, stamp);
        if (text) print_bot(turn.replies);
    }
    const auto hs = session.hypotheses ? *session.hypotheses : mentor::render_all_edges(session.map);
    if (format == "json") {
        nlohmann::ordered_json j;
        j["state"] = to_string(session.state.kind);
        j["map"] = mentor::map_to_json_value(session.map);
        j["hypotheses"] = mentor::hypotheses_to_json(hs);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "\nmap\n" << mentor::to_json(session.map) << "\n\nhypotheses\n";
    for (const auto& h : hs) std::cout << h.statement << "\n";
    return 0;
}

int run_export(const EngineFlags& flags, const std::string& id, const std::string& format,
               const std::string& data)
{
    mentor::service::MentorService service(load_model(flags.corpus), {data, flags.config(), nullptr});
    const auto r = service.export_session(id, format);
    if (r.status != 200) {
        std::cerr << "error: " << r.body << "\n";
        return 1;
    }
    std::cout << r.body;
    if (!r.body.empty() && r.body.back() != '\n') std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interview a founder and derive testable hypotheses from a cognitive map"};
    app.require_subcommand(1);

    EngineFlags engine_flags;

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string data = env_or("DATA_DIR", "data/sessions");
    std::string ui;
    try {
        port = std::stoi(env_or("PORT", "8080"));
    } catch (const std::exception&) {
        std::cerr << "error: PORT must be a number\n";
        return 2;
    }
    serve->add_option("--port", port, "Port, 0 for any free port (env PORT)")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    serve->add_option("--host", host, "Interface to bind")->capture_default_str();
    serve->add_option("--data", data, "Session log directory (env DATA_DIR)")->capture_default_str();
    serve->add_option("--ui", ui, "Static UI bundle served at /");
    engine_flags.add_to(serve);

    auto* repl = app.add_subcommand("repl", "Chat in the terminal");
    bool print_map = false;
    repl->add_flag("--print-map", print_map, "Print the final map as JSON");
    engine_flags.add_to(repl);

    auto* eval = app.add_subcommand("eval", "Cross-validate the intent model on a corpus");
    std::string eval_corpus = env_or("MENTOR_CORPUS", MENTOR_SEED_CORPUS);
    std::size_t folds = 5;
    double threshold = 0.9;
    double eval_clarification = mentor::nlu::default_clarification_threshold;
    bool eval_json = false;
    eval->add_option("--corpus", eval_corpus, "Labelled corpus (JSON Lines)")->capture_default_str();
    eval->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000))->capture_default_str();
    eval->add_option("--threshold", threshold, "Minimum accuracy for exit code 0")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    eval->add_option("--clarification-threshold", eval_clarification, "Classifier confidence cut-off")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    eval->add_flag("--json", eval_json, "Print metrics as JSON");

    auto* demo = app.add_subcommand("demo", "Replay a scripted interview");
    std::string script;
    std::string demo_format = "text";
    demo->add_option("--script", script, "Utterances, one per line (JSON Lines or text)")
        ->required()
        ->check(CLI::ExistingFile);
    demo->add_option("--format", demo_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    engine_flags.add_to(demo);

    auto* exp = app.add_subcommand("export", "Export a stored session");
    std::string session_id;
    std::string export_format = "json";
    exp->add_option("--session", session_id, "Session id")->required();
    exp->add_option("--format", export_format, "json, dot or markdown")
        ->check(CLI::IsMember({"json", "dot", "markdown"}))
        ->capture_default_str();
    exp->add_option("--data", data, "Session log directory (env DATA_DIR)")->capture_default_str();
    engine_flags.add_to(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*serve) return run_serve(engine_flags, host, port, data, ui);
        if (*repl) return run_repl(engine_flags, print_map);
        if (*eval) return run_eval(eval_corpus, folds, threshold, eval_clarification, eval_json);
        if (*demo) return run_demo(engine_flags, script, demo_format);
        if (*exp) return run_export(engine_flags, session_id, export_format, data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
