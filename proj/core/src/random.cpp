#include "saltda/random.hpp"

namespace saltda {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

StreamKey::StreamKey(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : seed_(seed), path_(path) {}

StreamKey StreamKey::child(std::uint64_t word) const {
    StreamKey out = *this;
    out.path_.push_back(word);
    return out;
}

std::uint64_t StreamKey::digest() const {
    std::uint64_t h = splitmix64(seed_ ^ 0x5a17da5a17da5a17ULL);
    for (std::uint64_t w : path_) {
        h = splitmix64(h ^ splitmix64(w + 0x632be59bd9b4e019ULL));
    }
    return h;
}

RandomStream::RandomStream(const StreamKey& key) {
    const std::uint64_t d = key.digest();
    std::seed_seq seq{static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32),
                      static_cast<std::uint32_t>(splitmix64(d)),
                      static_cast<std::uint32_t>(splitmix64(d) >> 32)};
    engine_.seed(seq);
}

std::size_t RandomStream::index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

}  // namespace saltda
