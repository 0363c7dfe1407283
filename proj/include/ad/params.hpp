#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ad/tensor.hpp"

namespace ad {

// Named flat parameter arrays spanning the whole model. Names are unique and
// ordering is fixed at creation, so iteration (checkpoints, optimizer state,
// gradient accumulation) is deterministic.
class ParamSet {
  public:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor grad;
    };

    Tensor& add(const std::string& name, Tensor init) {
        if (index_.count(name)) throw std::logic_error("duplicate parameter name: " + name);
        index_[name] = entries_.size();
        entries_.push_back(Entry{name, std::move(init), Tensor()});
        Entry& e = entries_.back();
        e.grad = Tensor::zeros(e.value.shape);
        return e.value;
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    Entry& at(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::logic_error("unknown parameter: " + name);
        return entries_[it->second];
    }
    const Entry& at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::logic_error("unknown parameter: " + name);
        return entries_[it->second];
    }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }

    void zero_grads() {
        for (auto& e : entries_)
            std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
    }

    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += e.value.size();
        return n;
    }

  private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Parameters subject to L2 regularization: weight matrices and embeddings,
// not biases or layer-norm gains/biases.
inline bool is_regularized_weight(const std::string& name) {
    auto ends_with = [&](std::string_view suf) {
        return name.size() >= suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
    };
    return ends_with(".weight") || ends_with(".emb");
}

}  // namespace ad
