// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include <httplib.h>

#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"
#include "mentor/nlu/evaluate.hpp"
#include "support/fixtures.hpp"

using namespace mentor;
using namespace mentor::testing;
using nlohmann::json;

namespace {

/// Collects the first few mismatches of a check.
class Check {
public:
    void expect(bool ok, const std::string& what)
    {
        if (ok) return;
        if (failures_.size() < 5) failures_.push_back(what);
        ++count_;
    }
    bool ok() const { return count_ == 0; }
    std::string detail() const
    {
        std::string s;
        for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
        if (count_ > failures_.size()) s += "; +" + std::to_string(count_ - failures_.size()) + " more";
        return s;
    }

private:
    std::vector<std::string> failures_;
    std::size_t count_ = 0;
};

template <class A, class B>
void expect_eq(Check& c, const A& a, const B& b, const std::string& what)
{
    if (a == b) return;
    std::ostringstream os;
    os << what << ": got '" << a << "', want '" << b << "'";
    c.expect(false, os.str());
}

// AC1 ----------------------------------------------------------------------

Check uber_golden_transcript()
{
    Check c;
    const auto s = run_script(uber_script());
    expect_eq(c, s.done(), true, "finished");
    expect_eq(c, s.map.nodes_of(NodeKind::Product).size(), 1u, "products");
    expect_eq(c, s.map.nodes_of(NodeKind::Customer).size(), 1u, "customers");
    expect_eq(c, s.map.nodes_of(NodeKind::Problem).size(), 2u, "problems");
    expect_eq(c, s.map.nodes_of(NodeKind::Feature).size(), 2u, "features");
    expect_eq(c, s.map.edges().size(), 6u, "edges");
    const auto hs = s.hypotheses.value_or(std::vector<Hypothesis>{});
    expect_eq(c, hs.size(), 6u, "hypotheses");
    std::map<HypothesisKind, int> kinds;
    for (const auto& h : hs) ++kinds[h.kind];
    expect_eq(c, kinds[HypothesisKind::Feasibility], 2, "feasibility");
    expect_eq(c, kinds[HypothesisKind::Value], 2, "value");
    expect_eq(c, kinds[HypothesisKind::Problem], 2, "problem");
    const auto golden = read_lines(golden_path("uber_hypotheses.txt"));
    for (std::size_t i = 0; i < std::max(golden.size(), hs.size()); ++i) {
        expect_eq(c, i < hs.size() ? hs[i].statement : "", i < golden.size() ? golden[i] : "",
                  "statement " + std::to_string(i + 1));
    }
    expect_eq(c, hs.empty() ? "" : hs.front().statement, "Riders has difficulty to find a cab in some places.",
              "first statement");
    return c;
}

// AC2 ----------------------------------------------------------------------

Check example_utterances()
{
    using nlu::IntentKind;
    Check c;
    const auto& model = *seed_model();
    const nlu::IntentSet problem = {IntentKind::DesireDescription, IntentKind::DifficultyDescription};
    struct Case {
        const char* text;
        nlu::IntentSet admissible;
        IntentKind intent;
        const char* clause;
    };
    const Case cases[] = {
        {"to book a ride", problem, IntentKind::DesireDescription, "book a ride"},
        {"because it is hard to find a cab in some places", problem, IntentKind::DifficultyDescription,
         "find a cab in some places"},
        {"The app allows the users to export data", {IntentKind::FeatureDescription}, IntentKind::FeatureDescription,
         "export data"},
        {"They want to attract people to play", problem, IntentKind::DesireDescription, "attract people to play"},
        {"They want to attract people to play", {IntentKind::FeatureDescription}, IntentKind::FeatureDescription,
         "attract people to play"},
    };
    for (const auto& k : cases) {
        const auto r = nlu::classify(model, k.text, k.admissible);
        expect_eq(c, nlu::to_string(r.intent.kind), nlu::to_string(k.intent), std::string("intent of ") + k.text);
        expect_eq(c, r.clause ? r.clause->text : std::string("<none>"), k.clause, std::string("clause of ") + k.text);
    }
    return c;
}

// AC3 ----------------------------------------------------------------------

Check template_conformance()
{
    Check c;
    expect_eq(c, polarity_verb(Polarity::Increase), "increases", "+");
    expect_eq(c, polarity_verb(Polarity::Decrease), "decreases", "-");
    expect_eq(c, polarity_verb(Polarity::Neutral), "does not affect", "/o/");

    const std::regex skeletons[] = {
        std::regex(R"(^The team developing .+ is capable of implementing .+\.$)"),
        std::regex(R"(^[A-Z].* (increases|decreases|does not affect) .+\.$)"),
        std::regex(R"(^[A-Z].* has difficulty to .+\.$)"),
        std::regex(R"(^[A-Z].* has .+\.$)"),
        std::regex(R"(^[A-Z].* would like .+\.$)"),
    };
    auto conforms = [&](const std::string& s) {
        return std::any_of(std::begin(skeletons), std::end(skeletons),
                           [&](const std::regex& r) { return std::regex_match(s, r); });
    };
    std::vector<Hypothesis> all = *run_script(uber_script()).hypotheses;
    std::mt19937 rng(31);
    for (int i = 0; i < 100; ++i) {
        auto hs = hypotheses_for(random_valid_map(rng));
        all.insert(all.end(), hs.begin(), hs.end());
    }
    for (const auto& h : all) c.expect(conforms(h.statement), "no skeleton for '" + h.statement + "'");
    return c;
}

// AC4 ----------------------------------------------------------------------

bool acyclic(const CognitiveMap& m)
{
    std::map<NodeId, int> mark;
    std::function<bool(const NodeId&)> visit = [&](const NodeId& n) {
        mark[n] = 1;
        for (const auto* e : m.out_edges(n)) {
            if (mark[e->target] == 1) return false;
            if (mark[e->target] == 0 && !visit(e->target)) return false;
        }
        mark[n] = 2;
        return true;
    };
    for (const auto& [id, node] : m.nodes()) {
        if (mark[id] == 0 && !visit(id)) return false;
    }
    return true;
}

Check refinement_algebra()
{
    Check c;
    std::mt19937 rng(4);
    for (int i = 0; i < 200; ++i) {
        auto m = random_valid_map(rng);
        std::vector<EdgeId> refinable;
        for (const auto& [id, e] : m.edges()) {
            if (e.kind != EdgeKind::Feasibility) refinable.push_back(id);
        }
        const auto edge = refinable[rng() % refinable.size()];
        const auto nodes = m.nodes().size();
        const auto edges = m.edges().size();
        const bool value = m.edge(edge).kind == EdgeKind::Value;
        m.refine_edge(edge, "concept", ClauseKind::Difficulty, ClauseForm::NounPhrase, Polarity::Increase,
                      value ? std::optional(Polarity::Decrease) : std::nullopt);
        expect_eq(c, m.nodes().size(), nodes + 1, "node delta");
        expect_eq(c, m.edges().size(), edges + 1, "edge delta");
        c.expect(m.find_edge(edge) == nullptr, "refined edge " + edge.value + " still present");
        c.expect(acyclic(m), "cycle after refinement");
    }

    DialogueEngine engine(seed_model());
    auto s = engine.new_session({5, 0.5}, "adversary", fixed_stamp);
    const auto script = uber_script();
    for (std::size_t i = 0; i < 15; ++i) engine.handle(s, script[i], fixed_stamp);
    std::set<EdgeId> asked;
    std::size_t turns = 0;
    while (!s.done() && turns++ < 5000) {
        std::string answer = "increase";
        if (s.state.kind == StateKind::AskRefine) {
            c.expect(asked.insert(*s.state.edge).second, "edge " + s.state.edge->value + " asked twice");
            answer = "yes";
        } else if (s.state.kind == StateKind::AskRefineConcept) {
            answer = "there is a long waiting time at the curb";
        }
        engine.handle(s, answer, fixed_stamp);
    }
    c.expect(s.done(), "always-yes session did not terminate");
    expect_eq(c, asked.size(), 4u * 31u, "refinement questions asked");
    return c;
}

// AC5 ----------------------------------------------------------------------

Check hypothesis_edge_bijection()
{
    Check c;
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_valid_map(rng);
        const auto hs = hypotheses_for(m);
        expect_eq(c, hs.size(), m.edges().size(), "map " + std::to_string(i));
        std::set<EdgeId> edges;
        for (const auto& h : hs) edges.insert(h.edge);
        expect_eq(c, edges.size(), m.edges().size(), "distinct edges in map " + std::to_string(i));
    }
    return c;
}

// AC6 ----------------------------------------------------------------------

int run_command(const std::string& cmd, std::string* out = nullptr)
{
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return -1;
    char buf[4096];
    std::string text;
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) text.append(buf, n);
    if (out) *out = text;
    const int raw = pclose(p);
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Check corpus_quality()
{
    Check c;
    const auto corpus = nlu::load_corpus(data_path("seed_corpus.jsonl"));
    c.expect(corpus.size() >= 60, "corpus has " + std::to_string(corpus.size()) + " utterances");
    const auto m = nlu::evaluate(corpus, 5);
    c.expect(m.accuracy >= 0.90, "accuracy " + std::to_string(m.accuracy));
    c.expect(m.clause_exact_match >= 0.80, "clause exact-match " + std::to_string(m.clause_exact_match));
    std::string out;
    const int status = run_command(std::string("'") + MENTOR_CLI_PATH + "' eval --corpus '" +
                                   data_path("seed_corpus.jsonl") + "' 2>&1", &out);
    expect_eq(c, status, 0, "eval exit status");
    std::cout << "  accuracy " << m.accuracy << " (" << m.correct << "/" << m.total << "), clause exact-match "
              << m.clause_exact_match << " (" << m.clause_matches << "/" << m.clause_total << "), macro-F1 "
              << m.macro_f1 << "\n";
    return c;
}

// AC7 ----------------------------------------------------------------------

Check help_interruption()
{
    Check c;
    DialogueEngine engine(seed_model());
    std::size_t states = 0;
    for (const auto& [kind, script] : state_reaching_scripts()) {
        auto s = run_script(script);
        const auto name = std::string(to_string(kind));
        expect_eq(c, to_string(s.state.kind), to_string(kind), "reached state");
        const auto state = s.state;
        const auto map = s.map;
        const auto turn = engine.handle(s, "help", fixed_stamp);
        c.expect(s.state == state, name + ": state changed");
        c.expect(s.map == map, name + ": map changed");
        c.expect(!turn.replies.empty() && turn.replies.front() == clarification_for(kind),
                 name + ": clarification missing");
        ++states;
    }
    expect_eq(c, states, std::size(all_state_kinds) - 2, "askable states covered");
    return c;
}

// AC8 ----------------------------------------------------------------------

/// `mentor serve` child process on a free port.
class ServerProcess {
public:
    explicit ServerProcess(const std::string& data)
    {
        const auto cmd = "exec sh -c 'echo $$; exec \"" + std::string(MENTOR_CLI_PATH) + "\" serve --port 0 --data \"" +
                         data + "\"'";
        pipe_ = popen(cmd.c_str(), "r");
        if (!pipe_) throw std::runtime_error("cannot start server");
        char line[256] = {};
        if (!fgets(line, sizeof line, pipe_)) throw std::runtime_error("no pid");
        pid_ = static_cast<pid_t>(std::stol(line));
        if (!fgets(line, sizeof line, pipe_)) throw std::runtime_error("server did not start");
        std::smatch m;
        std::string s(line);
        if (!std::regex_search(s, m, std::regex(R"(:(\d+))"))) throw std::runtime_error("no port in " + s);
        port_ = std::stoi(m[1]);
    }
    ~ServerProcess() { kill_hard(); }

    void kill_hard()
    {
        if (!pipe_) return;
        ::kill(pid_, SIGKILL);
        pclose(pipe_);
        pipe_ = nullptr;
    }

    httplib::Client client() const
    {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(30, 0);
        return c;
    }

private:
    FILE* pipe_ = nullptr;
    pid_t pid_ = 0;
    int port_ = 0;
};

std::string get_body(httplib::Client& c, const std::string& path, Check& check)
{
    auto r = c.Get(path.c_str());
    check.expect(r && r->status == 200, "GET " + path);
    return r ? r->body : std::string();
}

Check persistence_determinism()
{
    Check c;
    TempDir dir;
    const auto data = (dir.path() / "sessions").string();
    auto server = std::make_unique<ServerProcess>(data);
    std::string id;
    {
        auto client = server->client();
        auto r = client.Post("/api/sessions", "", "application/json");
        if (!r || r->status != 201) {
            c.expect(false, "create session");
            return c;
        }
        id = json::parse(r->body).at("session_id").get<std::string>();
    }
    const auto script = uber_script();
    std::size_t next = 0;
    for (std::size_t checkpoint : {3u, 12u, 19u}) {
        auto client = server->client();
        for (; next < checkpoint; ++next) {
            auto r = client.Post(("/api/sessions/" + id + "/messages").c_str(), json{{"text", script[next]}}.dump(),
                                 "application/json");
            c.expect(r && r->status == 200, "turn " + std::to_string(next + 1));
        }
        const auto before = get_body(client, "/api/sessions/" + id, c);
        server->kill_hard();
        server = std::make_unique<ServerProcess>(data);
        auto again = server->client();
        const auto after = get_body(again, "/api/sessions/" + id, c);
        c.expect(!before.empty() && before == after, "state differs after restart at turn " + std::to_string(checkpoint));
    }
    auto client = server->client();
    expect_eq(c, get_body(client, "/api/sessions/" + id + "/export?format=json", c) + "\n",
              read_file(golden_path("uber_map.json")), "JSON export");
    expect_eq(c, get_body(client, "/api/sessions/" + id + "/export?format=dot", c),
              read_file(golden_path("uber_map.dot")), "DOT export");
    return c;
}

}  // namespace

int main()
{
    const std::pair<const char*, std::function<Check()>> criteria[] = {
        {"AC1 Uber golden transcript", uber_golden_transcript},
        {"AC2 example utterance parsing", example_utterances},
        {"AC3 template conformance", template_conformance},
        {"AC4 refinement algebra", refinement_algebra},
        {"AC5 hypothesis-edge bijection", hypothesis_edge_bijection},
        {"AC6 NLU corpus quality", corpus_quality},
        {"AC7 help interruption", help_interruption},
        {"AC8 persistence determinism", persistence_determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check result;
        try {
            result = run();
        } catch (const std::exception& e) {
            result.expect(false, std::string("exception: ") + e.what());
        }
        if (result.ok()) {
            std::cout << "PASS " << name << std::endl;
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << result.detail() << std::endl;
        }
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}
