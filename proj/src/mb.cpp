#include "antnav/mb.hpp"

#include "antnav/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace antnav {

void MbParams::validate() const
{
    if (n_pn <= 0 || n_kc <= 0)
        throw std::invalid_argument("n_pn and n_kc must be positive");
    if (k <= 0 || k >= n_kc)
        throw std::invalid_argument("k must satisfy 0 < k < n_kc");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1]");
    if (tau_e < 0)
        throw std::invalid_argument("tau_e must be non-negative");
    if (fan_in <= 0)
        throw std::invalid_argument("fan_in must be positive");
    if (fan_in > n_pn)
        throw std::invalid_argument("fan_in exceeds n_pn");
}

const char *to_string(Consolidation mode)
{
    switch (mode) {
    case Consolidation::selective: return "selective";
    case Consolidation::excessive: return "excessive";
    case Consolidation::checkpoint: return "checkpoint";
    }
    return "?";
}

Consolidation consolidation_from_string(std::string_view name)
{
    for (auto mode : {Consolidation::selective, Consolidation::excessive, Consolidation::checkpoint})
        if (name == to_string(mode))
            return mode;
    throw std::invalid_argument("unknown consolidation mode: " + std::string(name));
}

PlasticState::PlasticState(int n_kc)
{
    const auto n = static_cast<std::size_t>(n_kc);
    for (int r = 0; r < 2; ++r) {
        w1[r].assign(n, 1.0);
        ltm[r].assign(n, 0.0);
        itm[r].assign(n, 0.0);
        stm[r].assign(n, 0.0);
    }
}

// ---------------------------------------------------------------------------

void EligibilityBuffer::push(Frame frame)
{
    frames_.push_back(std::move(frame));
    while (frames_.size() > depth_)
        frames_.pop_front();
}

const EligibilityBuffer::Frame *EligibilityBuffer::delayed() const
{
    return frames_.empty() ? nullptr : &frames_.front();
}

const EligibilityBuffer::Frame *EligibilityBuffer::latest() const
{
    return frames_.empty() ? nullptr : &frames_.back();
}

// ---------------------------------------------------------------------------

MushroomBody::MushroomBody(const MbParams &params)
    : params_(params), state_(0), buffer_(std::max(params.tau_e, 0))
{
    params_.validate();
    state_ = PlasticState(params_.n_kc);

    // Each KC samples fan_in distinct PNs (partial Fisher-Yates per row).
    w0_.resize(static_cast<std::size_t>(params_.n_kc) * static_cast<std::size_t>(params_.fan_in));
    Rng rng(derive_seed(params_.seed, 0x4b43));
    std::vector<std::uint32_t> pool(static_cast<std::size_t>(params_.n_pn));
    for (int kc = 0; kc < params_.n_kc; ++kc) {
        for (std::size_t i = 0; i < pool.size(); ++i)
            pool[i] = static_cast<std::uint32_t>(i);
        for (int j = 0; j < params_.fan_in; ++j) {
            const int pick = rng.uniform_int(j, params_.n_pn - 1);
            std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
        }
        std::sort(pool.begin(), pool.begin() + params_.fan_in);
        std::copy_n(pool.begin(), params_.fan_in, w0_.begin() + static_cast<std::ptrdiff_t>(kc) * params_.fan_in);
    }
}

std::span<const std::uint32_t> MushroomBody::kc_inputs(std::uint32_t kc) const
{
    return std::span<const std::uint32_t>(w0_).subspan(static_cast<std::size_t>(kc) * params_.fan_in,
                                                       static_cast<std::size_t>(params_.fan_in));
}

KcActivity MushroomBody::encode(std::span<const float> pn) const
{
    if (pn.size() != static_cast<std::size_t>(params_.n_pn))
        throw std::invalid_argument("PN vector length does not match n_pn");

    const auto n_kc = static_cast<std::size_t>(params_.n_kc);
    const auto fan = static_cast<std::size_t>(params_.fan_in);
    std::vector<float> scores(n_kc);
    const std::uint32_t *idx = w0_.data();
    for (std::size_t kc = 0; kc < n_kc; ++kc, idx += fan) {
        float sum = 0.0f;
        for (std::size_t j = 0; j < fan; ++j)
            sum += pn[idx[j]];
        scores[kc] = sum;
    }

    // Threshold = k-th largest score; take everything above it, then fill
    // from the tied scores in index order.
    const auto k = static_cast<std::size_t>(params_.k);
    std::vector<float> sorted = scores;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(),
                     std::greater<>());
    const float threshold = sorted[k - 1];

    KcActivity out;
    out.active.reserve(k);
    std::size_t above = 0;
    for (float s : scores)
        above += s > threshold ? 1 : 0;
    std::size_t ties_allowed = k - above;
    for (std::size_t kc = 0; kc < n_kc; ++kc) {
        if (scores[kc] > threshold) {
            out.active.push_back(static_cast<std::uint32_t>(kc));
        } else if (scores[kc] == threshold && ties_allowed > 0) {
            out.active.push_back(static_cast<std::uint32_t>(kc));
            --ties_allowed;
        }
    }
    return out;
}

void MushroomBody::observe(const KcActivity &kc)
{
    EligibilityBuffer::Frame frame;
    frame.kc = kc;
    for (int r = 0; r < 2; ++r) {
        frame.snapshot[r].reserve(kc.active.size());
        for (auto i : kc.active)
            frame.snapshot[r].push_back(state_.w1[r][i]);
    }
    buffer_.push(std::move(frame));
}

MbonOutput MushroomBody::read_out(const KcActivity &kc) const
{
    double left = 0.0;
    double right = 0.0;
    for (auto i : kc.active) {
        left += state_.w1[0][i];
        right += state_.w1[1][i];
    }
    const double k = static_cast<double>(params_.k);
    return {left / k, right / k};
}

void MushroomBody::depress(int r, const KcActivity &kc, std::span<const double> reference)
{
    auto &w1 = state_.w1[r];
    auto &ltm = state_.ltm[r];
    auto &itm = state_.itm[r];
    auto &stm = state_.stm[r];
    for (std::size_t j = 0; j < kc.active.size(); ++j) {
        const auto i = kc.active[j];
        const double decrement = std::min(w1[i], params_.alpha * reference[j]);
        stm[i] += decrement;
        w1[i] = std::clamp(1.0 - (ltm[i] + itm[i] + stm[i]), 0.0, 1.0);
    }
}

bool MushroomBody::punish(Side side)
{
    const auto *frame = buffer_.delayed();
    if (frame == nullptr)
        return false;
    const int r = row(side);
    depress(r, frame->kc, frame->snapshot[r]);
    return true;
}

void MushroomBody::reward(Side side, const KcActivity &current)
{
    const int r = row(side);
    std::vector<double> live;
    live.reserve(current.active.size());
    for (auto i : current.active)
        live.push_back(state_.w1[r][i]);
    depress(r, current, live);
}

bool MushroomBody::end_trial(double spl, double best_spl, Consolidation mode)
{
    const bool consolidate = mode == Consolidation::excessive || spl > best_spl;
    for (int r = 0; r < 2; ++r) {
        auto &ltm = state_.ltm[r];
        auto &itm = state_.itm[r];
        auto &stm = state_.stm[r];
        if (consolidate)
            for (std::size_t i = 0; i < ltm.size(); ++i)
                ltm[i] += itm[i];
        itm.swap(stm);
        std::fill(stm.begin(), stm.end(), 0.0);
    }
    refresh_w1();
    buffer_.clear();
    return consolidate;
}

void MushroomBody::reset_episode()
{
    state_ = PlasticState(params_.n_kc);
    buffer_.clear();
}

void MushroomBody::restore(const PlasticState &state)
{
    if (state.w1[0].size() != static_cast<std::size_t>(params_.n_kc))
        throw std::invalid_argument("plastic state size does not match n_kc");
    state_ = state;
    buffer_.clear();
}

void MushroomBody::refresh_w1()
{
    for (int r = 0; r < 2; ++r)
        for (std::size_t i = 0; i < state_.w1[r].size(); ++i)
            state_.w1[r][i] = std::clamp(1.0 - (state_.ltm[r][i] + state_.itm[r][i] + state_.stm[r][i]), 0.0, 1.0);
}

double MushroomBody::conservation_error() const
{
    double worst = 0.0;
    for (int r = 0; r < 2; ++r)
        for (std::size_t i = 0; i < state_.w1[r].size(); ++i) {
            const double total = state_.ltm[r][i] + state_.itm[r][i] + state_.stm[r][i];
            worst = std::max(worst, std::abs(total - (1.0 - state_.w1[r][i])));
        }
    return worst;
}

nlohmann::json MushroomBody::dump() const
{
    nlohmann::json blob;
    blob["n_pn"] = params_.n_pn;
    blob["n_kc"] = params_.n_kc;
    blob["k"] = params_.k;
    blob["fan_in"] = params_.fan_in;
    blob["seed"] = params_.seed;
    auto layer = [](const std::array<std::vector<double>, 2> &rows) {
        return nlohmann::json{{"left", rows[0]}, {"right", rows[1]}};
    };
    blob["layers"] = {{"ltm", layer(state_.ltm)}, {"itm", layer(state_.itm)}, {"stm", layer(state_.stm)}};
    return blob;
}

void MushroomBody::load(const nlohmann::json &blob)
{
    if (blob.at("n_pn").get<int>() != params_.n_pn || blob.at("n_kc").get<int>() != params_.n_kc ||
        blob.at("fan_in").get<int>() != params_.fan_in || blob.at("seed").get<std::uint64_t>() != params_.seed)
        throw std::invalid_argument("weight dump was produced with different MB parameters");
    PlasticState state(params_.n_kc);
    const auto &layers = blob.at("layers");
    auto read = [&](const char *name, std::array<std::vector<double>, 2> &rows) {
        rows[0] = layers.at(name).at("left").get<std::vector<double>>();
        rows[1] = layers.at(name).at("right").get<std::vector<double>>();
        for (const auto &r : rows)
            if (r.size() != static_cast<std::size_t>(params_.n_kc))
                throw std::invalid_argument(std::string("layer ") + name + " has the wrong length");
    };
    read("ltm", state.ltm);
    read("itm", state.itm);
    read("stm", state.stm);
    state_ = std::move(state);
    refresh_w1();
    buffer_.clear();
}

// ---------------------------------------------------------------------------

void CheckpointLog::record(int trial, double spl, const PlasticState &state)
{
    entries_.push_back({trial, spl, state});
}

const CheckpointLog::Entry *CheckpointLog::best() const
{
    const Entry *best = nullptr;
    for (const auto &e : entries_)
        if (best == nullptr || e.spl > best->spl)
            best = &e;
    return best;
}

bool CheckpointLog::restore_best(MushroomBody &mb) const
{
    const Entry *entry = best();
    if (entry == nullptr)
        return false;
    mb.restore(entry->state);
    return true;
}

}  // namespace antnav
