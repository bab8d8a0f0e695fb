#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/dialogue.hpp"

namespace mentor::service {

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool valid_session_id(std::string_view id)
{
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_';
        if (!ok) return false;
    }
    return true;
}

/// One JSON Lines file per session under the data directory:
///
///   {"event":"created","session_id":..,"timestamp":..,"config":{..},"replies":[..]}
///   {"event":"turn","timestamp":..,"text":..,"replies":[..],"state":..,"done":..}
///
/// Turn events double as checkpoints: on load every user text is replayed
/// through the engine and the resulting state name must match the logged one.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& directory() const noexcept { return dir_; }

    std::filesystem::path path_for(std::string_view id) const
    {
        return dir_ / (std::string(id) + ".jsonl");
    }

    bool exists(std::string_view id) const
    {
        std::error_code ec;
        return valid_session_id(id) && std::filesystem::is_regular_file(path_for(id), ec);
    }

    std::vector<std::string> list() const
    {
        std::vector<std::string> ids;
        std::error_code ec;
        if (!std::filesystem::is_directory(dir_, ec)) return ids;
        for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
            if (entry.path().extension() == ".jsonl") ids.push_back(entry.path().stem().string());
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    void record_created(const DialogueSession& s)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw StorageError("cannot create data directory '" + dir_.string() + "': " + ec.message());
        if (exists(s.id)) throw StorageError("session log '" + s.id + "' already exists");

        nlohmann::ordered_json j;
        j["event"] = "created";
        j["session_id"] = s.id;
        j["timestamp"] = s.transcript.empty() ? std::string() : s.transcript.front().timestamp;
        j["config"] = {{"max_refinement_rounds", s.config.max_refinement_rounds},
                       {"clarification_threshold", s.config.clarification_threshold}};
        auto replies = nlohmann::ordered_json::array();
        for (const auto& t : s.transcript) replies.push_back(t.text);
        j["replies"] = std::move(replies);
        append(s.id, j);
    }

    void record_turn(const std::string& id, std::string_view text, const std::string& timestamp,
                     const TurnResult& turn)
    {
        nlohmann::ordered_json j;
        j["event"] = "turn";
        j["timestamp"] = timestamp;
        j["text"] = text;
        j["replies"] = turn.replies;
        j["state"] = to_string(turn.state.kind);
        j["done"] = turn.done;
        append(id, j);
    }

    /// Rebuilds the session by replaying its log. Returns nothing when no
    /// log exists; throws StorageError when the log is corrupt or diverges.
    std::optional<DialogueSession> load(std::string_view id, const DialogueEngine& engine) const
    {
        if (!exists(id)) return std::nullopt;
        std::ifstream in(path_for(id));
        if (!in) throw StorageError("cannot read session log '" + std::string(id) + "'");

        std::optional<DialogueSession> session;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto where = "session log '" + std::string(id) + "' line " + std::to_string(lineno);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
                const auto event = j.at("event").get<std::string>();
                if (event == "created") {
                    if (session) throw StorageError(where + ": duplicate created event");
                    EngineConfig config;
                    config.max_refinement_rounds = j.at("config").at("max_refinement_rounds").get<std::size_t>();
                    config.clarification_threshold = j.at("config").at("clarification_threshold").get<double>();
                    session = engine.new_session(config, j.at("session_id").get<std::string>(),
                                                 j.at("timestamp").get<std::string>());
                } else if (event == "turn") {
                    if (!session) throw StorageError(where + ": turn before created event");
                    const auto turn = engine.handle(*session, j.at("text").get<std::string>(),
                                                    j.at("timestamp").get<std::string>());
                    if (to_string(turn.state.kind) != j.at("state").get<std::string>()) {
                        throw StorageError(where + ": replay reached state '" +
                                           std::string(to_string(turn.state.kind)) + "', log says '" +
                                           j.at("state").get<std::string>() + "'");
                    }
                } else {
                    throw StorageError(where + ": unknown event '" + event + "'");
                }
            } catch (const nlohmann::json::exception& e) {
                throw StorageError(where + ": " + e.what());
            } catch (const SessionDone&) {
                throw StorageError(where + ": turn after the interview finished");
            }
        }
        if (!session) throw StorageError("session log '" + std::string(id) + "' is empty");
        return session;
    }

private:
    std::filesystem::path dir_;

    void append(const std::string& id, const nlohmann::ordered_json& event)
    {
        std::ofstream out(path_for(id), std::ios::app | std::ios::binary);
        if (!out) throw StorageError("cannot open session log '" + path_for(id).string() + "' for append");
        out << event.dump() << '\n';
        out.flush();
        if (!out) throw StorageError("write to session log '" + path_for(id).string() + "' failed");
    }
};

}  // namespace mentor::service
