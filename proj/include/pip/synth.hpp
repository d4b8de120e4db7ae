#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pip/contacts.hpp"
#include "pip/model.hpp"

namespace pip::synth {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi] without relying on library distributions, so
/// generated corpora are identical across standard library implementations.
std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi);
double unit(Rng& rng);
template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, items.size() - 1))];
}
/// Fisher-Yates over uniform().
template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[static_cast<std::size_t>(uniform(rng, 0, i - 1))]);
  }
}

/// A plausible id for an inline contact of the given kind (QQ, WeChat,
/// Telegram or Other), valid under valid_contact_id.
std::string random_contact_id(ContactKind kind, Rng& rng);

/// A short phrase introducing an inline contact id, e.g. "加微信 abc123",
/// using the platform's plain name, an obfuscated name or its emoji.
std::string contact_phrase(ContactKind kind, const std::string& id, Rng& rng);

/// Sentences with zero or one inline contact, labeled with BIO tags. About a
/// fifth carry no contact and include number-shaped distractors.
std::vector<LabeledSentence> generate_ner_corpus(std::size_t n, std::uint64_t seed);

}  // namespace pip::synth
