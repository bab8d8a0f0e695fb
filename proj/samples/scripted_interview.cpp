// Runs an interview from a list of answers and prints the conversation.

#include <iostream>
#include <memory>

#include "mentor/dialogue.hpp"
#include "mentor/nlu/corpus.hpp"

int main(int argc, char** argv)
{
    using namespace mentor;

    const std::string corpus = argc > 1 ? argv[1] : MENTOR_SEED_CORPUS;
    auto model = std::make_shared<const nlu::ClassifierModel>(nlu::train(nlu::load_corpus(corpus)));
    DialogueEngine engine(model);
    auto session = engine.new_session({.max_refinement_rounds = 1});

    for (const auto& line : DialogueEngine::opening_lines()) std::cout << "bot> " << line << "\n";
    const char* answers[] = {
        "Spotify", "people who commute", "no", "they want to listen to music offline", "no",
        "playlist downloads", "1", "increase", "no", "yes", "to save mobile data", "increase", "no",
    };
    for (const char* answer : answers) {
        if (session.done()) break;
        std::cout << "you> " << answer << "\n";
        for (const auto& reply : engine.handle(session, answer).replies) std::cout << "bot> " << reply << "\n";
    }
}
