#pragma once

#include "antnav/geometry.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace antnav {

struct MbParams {
    int n_pn = 1089;
    int n_kc = 32000;
    int k = 320;
    double alpha = 1.0;      // learning rate, (0, 1]
    int tau_e = 3;           // punishment eligibility delay, frames
    int fan_in = 10;         // PN inputs per KC
    std::uint64_t seed = 1;

    // Throws std::invalid_argument.
    void validate() const;
};

// Indices of the k winning KCs, ascending.
struct KcActivity {
    std::vector<std::uint32_t> active;
    bool operator==(const KcActivity &) const = default;
};

struct MbonOutput {
    double left = 1.0;
    double right = 1.0;
};

enum class Consolidation { selective, excessive, checkpoint };
const char *to_string(Consolidation mode);
Consolidation consolidation_from_string(std::string_view name);

enum class MemoryLayer { ltm, itm, stm };

// Plastic KC->MBON state. Row 0 drives the left MBON, row 1 the right.
// w1 = 1 - (ltm + itm + stm) elementwise.
struct PlasticState {
    std::array<std::vector<double>, 2> w1;
    std::array<std::vector<double>, 2> ltm;
    std::array<std::vector<double>, 2> itm;
    std::array<std::vector<double>, 2> stm;

    explicit PlasticState(int n_kc = 0);
    bool operator==(const PlasticState &) const = default;
};

// Recent KC activity and the weights they saw, for delayed punishment.
class EligibilityBuffer {
public:
    struct Frame {
        KcActivity kc;
        std::array<std::vector<double>, 2> snapshot;  // w1 at kc.active, per side
    };

    explicit EligibilityBuffer(int tau_e) : depth_(static_cast<std::size_t>(tau_e) + 1) {}

    void push(Frame frame);
    // The frame tau_e steps back, or the oldest held if not yet warm.
    const Frame *delayed() const;
    const Frame *latest() const;
    std::size_t size() const { return frames_.size(); }
    std::size_t depth() const { return depth_; }
    bool warm() const { return frames_.size() == depth_; }
    void clear() { frames_.clear(); }

private:
    std::size_t depth_;
    std::deque<Frame> frames_;
};

class MushroomBody {
public:
    explicit MushroomBody(const MbParams &params);

    const MbParams &params() const { return params_; }

    // PN -> KC expansion and global k-WTA; ties go to the lowest index.
    KcActivity encode(std::span<const float> pn) const;
    // Records the frame in the eligibility buffer.
    void observe(const KcActivity &kc);
    MbonOutput read_out(const KcActivity &kc) const;

    // Depress the `side` row at the KCs active tau_e frames ago, against the
    // weights they had then. Returns false when nothing has been observed.
    bool punish(Side side);
    // Depress the `side` row at the current KCs against the live weights.
    void reward(Side side, const KcActivity &current);

    // Shift memory layers at the end of a trial. Returns whether LTM absorbed ITM.
    bool end_trial(double spl, double best_spl, Consolidation mode);
    void reset_episode();

    const PlasticState &state() const { return state_; }
    void restore(const PlasticState &state);
    double weight(Side side, std::uint32_t kc) const { return state_.w1[row(side)][kc]; }
    const std::vector<std::uint32_t> &pn_inputs() const { return w0_; }
    std::span<const std::uint32_t> kc_inputs(std::uint32_t kc) const;
    const EligibilityBuffer &eligibility() const { return buffer_; }

    // max |ltm + itm + stm - (1 - w1)| over every synapse.
    double conservation_error() const;

    nlohmann::json dump() const;
    // Restores plastic layers; params (and hence w0) must match.
    void load(const nlohmann::json &blob);

    static int row(Side side) { return side == Side::left ? 0 : 1; }

private:
    void depress(int r, const KcActivity &kc, std::span<const double> reference);
    void refresh_w1();

    MbParams params_;
    std::vector<std::uint32_t> w0_;  // n_kc * fan_in PN indices
    PlasticState state_;
    EligibilityBuffer buffer_;
};

// Checkpoint-mode log: full plastic state and SPL after every trial.
class CheckpointLog {
public:
    struct Entry {
        int trial = 0;
        double spl = 0.0;
        PlasticState state;
    };

    void record(int trial, double spl, const PlasticState &state);
    // Highest-SPL entry; earliest on ties.
    const Entry *best() const;
    bool restore_best(MushroomBody &mb) const;
    const std::vector<Entry> &entries() const { return entries_; }
    void clear() { entries_.clear(); }

private:
    std::vector<Entry> entries_;
};

}  // namespace antnav
