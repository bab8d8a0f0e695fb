// Draws a small map by hand, refines one arrow and prints what to test.

#include <iostream>

#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"

int main()
{
    using namespace mentor;

    CognitiveMap map;
    map.set_product("Uber");
    auto riders = map.add_customer("riders");
    auto [cab, cab_link] = map.add_problem("find a cab in some places", ClauseKind::Difficulty,
                                           ClauseForm::VerbPhrase, riders);
    auto booking = map.add_feature("book a ride", ClauseForm::VerbPhrase, cab, Polarity::Decrease);

    // Why does booking help? Because it cuts the waiting time at the curb.
    map.refine_edge(booking.value, "waiting time at the curb", ClauseKind::Difficulty,
                    ClauseForm::NounPhrase, Polarity::Decrease, Polarity::Increase);

    for (const auto& h : hypotheses_for(map)) {
        std::cout << "[" << to_string(h.kind) << "] " << h.statement << "\n";
    }
    std::cout << "\n" << to_dot(map);
}
