#include "semguide/tokenizer.hpp"

#include <cctype>
#include <sstream>

#include "semguide/rng.hpp"

namespace semguide {

namespace {

int64_t piece_id(const std::string& piece) {
    // keep ids non-negative so they serialize cleanly
    return static_cast<int64_t>(fnv1a64(piece) & 0x7fffffffffffffffull);
}

} // namespace

std::string ToyTokenizer::normalize_word(const std::string& word) const {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

std::vector<std::string> ToyTokenizer::word_pieces(const std::string& word) const {
    std::vector<std::string> pieces;
    std::string w = normalize_word(word);
    for (size_t off = 0; off < w.size(); off += static_cast<size_t>(chunk_))
        pieces.push_back(w.substr(off, static_cast<size_t>(chunk_)));
    return pieces;
}

TokenizedPrompt ToyTokenizer::tokenize(const std::string& text) const {
    TokenizedPrompt out;
    out.pieces.push_back(kStartToken);
    out.ids.push_back(piece_id(kStartToken));

    std::istringstream is(text);
    std::string raw;
    while (is >> raw) {
        std::string w = normalize_word(raw);
        if (w.empty()) continue;
        WordSpan span;
        span.text = w;
        span.first_piece = static_cast<int>(out.pieces.size());
        for (const auto& piece : word_pieces(w)) {
            out.pieces.push_back(piece);
            out.ids.push_back(piece_id(piece));
        }
        span.piece_count = static_cast<int>(out.pieces.size()) - span.first_piece;
        out.words.push_back(span);
    }

    out.pieces.push_back(kEndToken);
    out.ids.push_back(piece_id(kEndToken));
    out.special_indices = {0, static_cast<int>(out.pieces.size()) - 1};
    return out;
}

std::vector<std::string> split_normalized_words(const Tokenizer& tok, const std::string& text) {
    std::vector<std::string> words;
    std::istringstream is(text);
    std::string raw;
    while (is >> raw) {
        std::string w = tok.normalize_word(raw);
        if (!w.empty()) words.push_back(w);
    }
    return words;
}

} // namespace semguide
