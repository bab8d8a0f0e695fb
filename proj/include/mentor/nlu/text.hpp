#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mentor::nlu {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
    std::string text;   // as written
    std::string lower;  // lowercase form used for matching
    Span span;          // byte offsets into the tokenized string

    friend bool operator==(const Token&, const Token&) = default;
};

enum class Tag { Verb, Noun, Adj, Adv, Pron, Det, Prep, Conj, Num, Other };

inline std::string_view to_string(Tag t)
{
    static constexpr std::array<std::string_view, 10> names = {
        "VERB", "NOUN", "ADJ", "ADV", "PRON", "DET", "PREP", "CONJ", "NUM", "OTHER"};
    return names[static_cast<std::size_t>(t)];
}

struct TaggedToken {
    Token token;
    Tag tag = Tag::Other;

    friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

namespace detail {

inline bool is_word_byte(char c)
{
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || u >= 0x80;
}

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline Token make_token(std::string_view text, std::size_t begin, std::size_t end)
{
    auto piece = text.substr(begin, end - begin);
    return Token{std::string(piece), ascii_lower(piece), Span{begin, end}};
}

}  // namespace detail

/// Splits on whitespace and punctuation. Punctuation marks become tokens of
/// their own; apostrophe clitics are split off ("it's" -> "it" "'s",
/// "don't" -> "do" "n't"). Hyphenated words stay whole.
inline std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (detail::is_space(text[i])) {
            ++i;
            continue;
        }
        if (!detail::is_word_byte(text[i])) {
            out.push_back(detail::make_token(text, i, i + 1));
            ++i;
            continue;
        }
        // A word: word bytes, with inner hyphens and apostrophes.
        std::size_t j = i;
        while (j < n) {
            if (detail::is_word_byte(text[j])) {
                ++j;
            } else if ((text[j] == '-' || text[j] == '\'') && j + 1 < n &&
                       detail::is_word_byte(text[j + 1]) && j > i) {
                ++j;
            } else {
                break;
            }
        }
        auto word = text.substr(i, j - i);
        const auto lower = detail::ascii_lower(word);
        std::size_t split = std::string_view::npos;
        if (lower.size() > 3 && lower.ends_with("n't")) {
            split = word.size() - 3;
        } else if (auto apos = word.find('\''); apos != std::string_view::npos) {
            split = apos;
        }
        if (split != std::string_view::npos && split > 0) {
            out.push_back(detail::make_token(text, i, i + split));
            out.push_back(detail::make_token(text, i + split, j));
        } else {
            out.push_back(detail::make_token(text, i, j));
        }
        i = j;
    }
    return out;
}

namespace detail {

inline const std::unordered_map<std::string, Tag>& lexicon()
{
    static const std::unordered_map<std::string, Tag> lex = [] {
        std::unordered_map<std::string, Tag> m;
        auto add = [&m](Tag t, std::initializer_list<const char*> words) {
            for (const char* w : words) m.emplace(w, t);
        };
        add(Tag::Pron, {"i", "me", "my", "mine", "myself", "you", "your", "yours", "he", "him",
                        "his", "she", "her", "hers", "it", "its", "itself", "we", "us", "our",
                        "ours", "they", "them", "their", "theirs", "themselves", "who", "whom",
                        "whose", "what", "which", "someone", "somebody", "everyone", "everybody",
                        "anyone", "anybody", "nobody", "something", "everything", "anything",
                        "nothing"});
        add(Tag::Det, {"a", "an", "the", "this", "that", "these", "those", "some", "any", "no",
                       "every", "each", "all", "both", "many", "much", "more", "most", "few",
                       "several", "another", "other", "such", "either", "neither"});
        add(Tag::Prep, {"in", "on", "at", "by", "for", "with", "without", "about", "from", "to",
                        "of", "into", "onto", "over", "under", "between", "through", "during",
                        "before", "after", "above", "below", "near", "across", "against",
                        "around", "per", "via", "within", "than", "until", "toward", "towards",
                        "upon", "behind", "beyond"});
        add(Tag::Conj, {"and", "or", "but", "because", "so", "if", "when", "while", "although",
                        "though", "unless", "whether", "nor", "yet", "as", "since"});
        add(Tag::Adv, {"not", "n't", "very", "too", "really", "also", "just", "only", "always",
                       "never", "often", "sometimes", "usually", "well", "still", "already",
                       "even", "again", "here", "there", "now", "then", "maybe", "perhaps",
                       "almost", "quite", "rather", "enough", "instead", "together", "online",
                       "anymore", "soon", "please", "actually"});
        add(Tag::Adj, {"hard", "difficult", "easy", "high", "low", "expensive", "cheap", "good",
                       "bad", "new", "old", "big", "small", "long", "short", "fast", "slow",
                       "better", "best", "worse", "safe", "unsafe", "reliable", "available",
                       "simple", "complex", "busy", "late", "early", "free", "local", "social",
                       "mobile", "real", "personal", "public", "private", "able", "unable",
                       "happy", "possible", "impossible", "important", "hungry", "tired",
                       "first", "second", "third", "fourth", "fifth", "last", "same",
                       "different", "healthy", "nearby", "small-scale", "young", "elderly"});
        add(Tag::Num, {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
                       "nine", "ten"});
        add(Tag::Verb,
            {"'s", "'re", "'m", "'ve", "'ll", "'d", "am", "is", "are", "was", "were", "be",
             "been", "being", "do", "does", "did", "have", "has", "had", "can", "could", "will",
             "would", "shall", "should", "may", "might", "must", "want", "wants", "need",
             "needs", "use", "uses", "find", "finds", "book", "books", "take", "takes", "pay",
             "pays", "order", "get", "gets", "make", "makes", "buy", "sell", "share", "send",
             "track", "manage", "save", "create", "see", "know", "go", "come", "give", "help",
             "let", "lets", "allow", "allows", "enable", "enables", "export", "import",
             "search", "compare", "choose", "pick", "attract", "play", "reach", "learn",
             "split", "connect", "schedule", "check", "call", "reserve", "rent", "travel",
             "move", "sign", "post", "read", "write", "run", "start", "stop", "keep", "meet",
             "hire", "spend", "earn", "cook", "eat", "drive", "walk", "struggle", "struggles",
             "face", "faces", "like", "love", "hate", "try", "wait", "reduce", "reduces",
             "increase", "increases", "decrease", "decreases", "improve", "avoid", "access",
             "upload", "download", "store", "view", "add", "remove", "edit", "invite", "chat",
             "talk", "ask", "answer", "notify", "remind", "print", "scan", "sync", "organize",
             "rate", "recommend", "discover", "explore", "follow", "join", "register", "log",
             "browse", "filter", "monitor", "measure", "analyze", "automate", "collaborate",
             "communicate", "coordinate", "deliver", "ship", "cancel", "subscribe", "donate",
             "invest", "borrow", "lend", "study", "teach", "practice", "sleep", "feel", "say",
             "tell", "think", "look", "become", "show", "build", "fix", "open", "close",
             "bring", "hold", "turn", "leave", "lose", "miss", "locate", "understand",
             "afford", "plan", "prepare", "visit", "contact", "offer", "provide", "support",
             "mean", "explain", "affect", "affects", "lower", "raise", "raises"});
        return m;
    }();
    return lex;
}

inline bool all_digits(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline bool has_suffix(std::string_view w, std::string_view suffix, std::size_t min_stem = 2)
{
    return w.size() >= suffix.size() + min_stem && w.ends_with(suffix);
}

}  // namespace detail

/// Lexicon lookup, then suffix heuristics, then NOUN.
inline Tag tag_word(std::string_view lower)
{
    if (lower.empty()) return Tag::Other;
    if (!detail::is_word_byte(lower.front()) && lower.front() != '\'') return Tag::Other;
    if (detail::all_digits(lower)) return Tag::Num;
    const auto& lex = detail::lexicon();
    if (auto it = lex.find(std::string(lower)); it != lex.end()) return it->second;
    if (detail::has_suffix(lower, "ing") || detail::has_suffix(lower, "ed")) return Tag::Verb;
    if (detail::has_suffix(lower, "ly")) return Tag::Adv;
    for (std::string_view s : {"tion", "ness", "ity", "ment"}) {
        if (detail::has_suffix(lower, s)) return Tag::Noun;
    }
    for (std::string_view s : {"ous", "ful", "ive"}) {
        if (detail::has_suffix(lower, s)) return Tag::Adj;
    }
    return Tag::Noun;
}

inline std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens)
{
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(TaggedToken{t, tag_word(t.lower)});
    return out;
}

/// Trims, collapses whitespace runs and strips leading discourse markers
/// ("because", "since", "well", "so", "actually", ",") until none is left.
/// A marker that is the whole utterance is kept.
inline std::string normalize(std::string_view text)
{
    std::string collapsed;
    collapsed.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (detail::is_space(c)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed.push_back(' ');
        pending_space = false;
        collapsed.push_back(c);
    }

    static constexpr std::array<std::string_view, 5> markers = {"because", "since", "well", "so",
                                                                "actually"};
    std::string_view rest = collapsed;
    for (bool stripped = true; stripped;) {
        stripped = false;
        if (rest.starts_with(",")) {
            auto next = rest.substr(1);
            while (!next.empty() && next.front() == ' ') next.remove_prefix(1);
            if (!next.empty()) {
                rest = next;
                stripped = true;
                continue;
            }
        }
        for (auto m : markers) {
            if (rest.size() <= m.size()) continue;
            if (detail::ascii_lower(rest.substr(0, m.size())) != m) continue;
            const char after = rest[m.size()];
            if (after != ' ' && after != ',') continue;
            auto next = rest.substr(m.size());
            while (!next.empty() && (next.front() == ' ' || next.front() == ',')) next.remove_prefix(1);
            if (next.empty()) continue;
            rest = next;
            stripped = true;
            break;
        }
    }
    return std::string(rest);
}

}  // namespace mentor::nlu
