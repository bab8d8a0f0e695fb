#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mentor/dialogue.hpp"
#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"
#include "mentor/service/session_store.hpp"

namespace mentor::service {

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ApiError {
    int status;
    std::string code;
    std::string message;
};

inline Response error_response(const ApiError& e)
{
    nlohmann::ordered_json j;
    j["error"] = {{"code", e.code}, {"message", e.message}};
    return {e.status, "application/json", j.dump()};
}

inline Response json_response(int status, const nlohmann::ordered_json& j)
{
    return {status, "application/json", j.dump()};
}

/// Transport-independent request handlers. The HTTP layer and the tests
/// call these directly; every result is a status code plus a body.
class MentorService {
public:
    struct Options {
        std::filesystem::path data_dir = "data/sessions";
        EngineConfig defaults{};
        /// Runs while a turn holds its session lock. Tests use it to
        /// provoke overlapping requests.
        std::function<void(const std::string&)> during_turn;
    };

    MentorService(std::shared_ptr<const nlu::ClassifierModel> model, Options options)
        : engine_(std::move(model)), store_(options.data_dir), options_(std::move(options))
    {}

    const DialogueEngine& engine() const noexcept { return engine_; }
    const SessionStore& store() const noexcept { return store_; }

    Response create_session(std::string_view body)
    {
        auto config = options_.defaults;
        if (auto err = parse_config(body, config)) return error_response(*err);

        auto session = engine_.new_session(config);
        try {
            store_.record_created(session);
        } catch (const StorageError& e) {
            return error_response({500, "storage_error", e.what()});
        }

        auto greeting = nlohmann::ordered_json::array();
        for (const auto& t : session.transcript) greeting.push_back(t.text);
        nlohmann::ordered_json j;
        j["session_id"] = session.id;
        j["greeting"] = std::move(greeting);
        j["state"] = to_string(session.state.kind);

        auto entry = std::make_shared<Entry>();
        entry->session = std::move(session);
        std::lock_guard lock(registry_mutex_);
        registry_[entry->session.id] = entry;
        return json_response(201, j);
    }

    Response post_message(const std::string& id, std::string_view body)
    {
        std::shared_ptr<Entry> entry;
        if (auto err = lookup(id, entry)) return error_response(*err);

        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            return error_response({400, "bad_request", "body must be a JSON object"});
        }
        if (!j.contains("text") || !j["text"].is_string()) {
            return error_response({400, "bad_request", "field 'text' must be a string"});
        }
        const auto text = j["text"].get<std::string>();
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
            return error_response({400, "empty_text", "message text is empty"});
        }

        std::unique_lock turn_lock(entry->turn, std::try_to_lock);
        if (!turn_lock.owns_lock()) {
            return error_response({409, "turn_in_progress", "another message for this session is being processed"});
        }
        if (options_.during_turn) options_.during_turn(id);
        auto next = snapshot(*entry);
        if (next.done()) {
            return error_response({410, "session_done", "the interview has finished"});
        }

        const auto timestamp = utc_timestamp();
        const auto turn = engine_.handle(next, text, timestamp);
        try {
            store_.record_turn(id, text, timestamp, turn);
        } catch (const StorageError& e) {
            return error_response({500, "storage_error", e.what()});
        }
        {
            std::lock_guard data_lock(entry->data);
            entry->session = std::move(next);
        }
        return json_response(200, turn_to_json(turn));
    }

    Response get_session(const std::string& id)
    {
        return with_session(id, [](const DialogueSession& s) { return json_response(200, session_to_json(s)); });
    }

    Response get_map(const std::string& id)
    {
        return with_session(id, [](const DialogueSession& s) {
            return json_response(200, map_to_json_value(s.map));
        });
    }

    Response get_hypotheses(const std::string& id)
    {
        return with_session(id, [](const DialogueSession& s) {
            return json_response(200, hypotheses_to_json(s.hypotheses.value_or(std::vector<Hypothesis>{})));
        });
    }

    Response export_session(const std::string& id, std::string_view format)
    {
        if (format != "json" && format != "dot" && format != "markdown") {
            // Unknown sessions still answer 404 first.
            std::shared_ptr<Entry> entry;
            if (auto err = lookup(id, entry)) return error_response(*err);
            return error_response({400, "bad_format", "format must be json, dot or markdown"});
        }
        return with_session(id, [format](const DialogueSession& s) {
            if (format == "json") return Response{200, "application/json", to_json(s.map)};
            if (format == "dot") return Response{200, "text/vnd.graphviz", to_dot(s.map)};
            const auto hs = s.hypotheses ? *s.hypotheses : render_all_edges(s.map);
            return Response{200, "text/markdown; charset=utf-8", markdown_report(s.map, hs)};
        });
    }

    /// Drops in-memory copies; the next access replays the logs.
    void forget_all()
    {
        std::lock_guard lock(registry_mutex_);
        registry_.clear();
    }

private:
    struct Entry {
        std::mutex turn;  // held for a whole turn; contention answers 409
        std::mutex data;  // guards `session`
        DialogueSession session;
    };

    static DialogueSession snapshot(Entry& e)
    {
        std::lock_guard lock(e.data);
        return e.session;
    }

    DialogueEngine engine_;
    SessionStore store_;
    Options options_;
    std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> registry_;

    std::optional<ApiError> parse_config(std::string_view body, EngineConfig& config) const
    {
        if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return std::nullopt;
        auto j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return ApiError{400, "bad_request", "body must be a JSON object"};
        if (j.contains("max_refinement_rounds")) {
            const auto& v = j["max_refinement_rounds"];
            if (!v.is_number_unsigned()) {
                return ApiError{400, "bad_request", "max_refinement_rounds must be a non-negative integer"};
            }
            config.max_refinement_rounds = v.get<std::size_t>();
        }
        if (j.contains("clarification_threshold")) {
            const auto& v = j["clarification_threshold"];
            if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) {
                return ApiError{400, "bad_request", "clarification_threshold must be a number in [0, 1]"};
            }
            config.clarification_threshold = v.get<double>();
        }
        return std::nullopt;
    }

    std::optional<ApiError> lookup(const std::string& id, std::shared_ptr<Entry>& out)
    {
        std::lock_guard lock(registry_mutex_);
        if (auto it = registry_.find(id); it != registry_.end()) {
            out = it->second;
            return std::nullopt;
        }
        if (!store_.exists(id)) return ApiError{404, "not_found", "no session '" + id + "'"};
        try {
            auto session = store_.load(id, engine_);
            auto entry = std::make_shared<Entry>();
            entry->session = std::move(*session);
            registry_[id] = entry;
            out = entry;
            return std::nullopt;
        } catch (const StorageError& e) {
            return ApiError{500, "storage_error", e.what()};
        }
    }

    template <class F>
    Response with_session(const std::string& id, F&& render)
    {
        std::shared_ptr<Entry> entry;
        if (auto err = lookup(id, entry)) return error_response(*err);
        std::lock_guard lock(entry->data);
        return render(entry->session);
    }
};

}  // namespace mentor::service
