#include "ad/autograd.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace ad {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

void check2d(const Var a) {
    if (a->value.shape.size() != 2) throw std::logic_error("expected rank-2 tensor");
}

}  // namespace

double gelu_scalar(double x) { return x * 0.5 * std::erfc(-x / kSqrt2); }

Var matmul(Tape& t, Var a, Var b) {
    check2d(a);
    check2d(b);
    const std::size_t m = a->value.rows(), k = a->value.cols(), n = b->value.cols();
    if (b->value.rows() != k) throw std::logic_error("matmul shape mismatch");
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a->value(i, p);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += av * b->value(p, j);
        }
    return t.make(std::move(out), {a, b}, [m, k, n](Node& node, Tape&) {
        Var a = node.parents[0], b = node.parents[1];
        // dA = dY B^T, dB = A^T dY
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = node.grad(i, j);
                for (std::size_t p = 0; p < k; ++p) {
                    a->grad(i, p) += g * b->value(p, j);
                    b->grad(p, j) += a->value(i, p) * g;
                }
            }
    });
}

Var matmul_nt(Tape& t, Var a, Var b) {
    check2d(a);
    check2d(b);
    const std::size_t m = a->value.rows(), k = a->value.cols(), n = b->value.rows();
    if (b->value.cols() != k) throw std::logic_error("matmul_nt shape mismatch");
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a->value(i, p) * b->value(j, p);
            out(i, j) = s;
        }
    return t.make(std::move(out), {a, b}, [m, k, n](Node& node, Tape&) {
        Var a = node.parents[0], b = node.parents[1];
        // Y = A B^T: dA = dY B, dB = dY^T A
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = node.grad(i, j);
                for (std::size_t p = 0; p < k; ++p) {
                    a->grad(i, p) += g * b->value(j, p);
                    b->grad(j, p) += g * a->value(i, p);
                }
            }
    });
}

Var add(Tape& t, Var a, Var b) {
    if (!a->value.same_shape(b->value)) throw std::logic_error("add shape mismatch");
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a->value.data[i] + b->value.data[i];
    return t.make(std::move(out), {a, b}, [](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i) {
            node.parents[0]->grad.data[i] += node.grad.data[i];
            node.parents[1]->grad.data[i] += node.grad.data[i];
        }
    });
}

Var add_rowvec(Tape& t, Var a, Var b) {
    check2d(a);
    const std::size_t m = a->value.rows(), n = a->value.cols();
    if (b->value.size() != n) throw std::logic_error("add_rowvec shape mismatch");
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a->value(i, j) + b->value.data[j];
    return t.make(std::move(out), {a, b}, [m, n](Node& node, Tape&) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = node.grad(i, j);
                node.parents[0]->grad(i, j) += g;
                node.parents[1]->grad.data[j] += g;
            }
    });
}

Var scale(Tape& t, Var a, double c) {
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a->value.data[i] * c;
    return t.make(std::move(out), {a}, [c](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i)
            node.parents[0]->grad.data[i] += node.grad.data[i] * c;
    });
}

Var gelu(Tape& t, Var a) {
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = gelu_scalar(a->value.data[i]);
    return t.make(std::move(out), {a}, [](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i) {
            const double x = node.parents[0]->value.data[i];
            const double phi = 0.5 * std::erfc(-x / kSqrt2);
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
            node.parents[0]->grad.data[i] += node.grad.data[i] * (phi + x * pdf);
        }
    });
}

Var tanh_op(Tape& t, Var a) {
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::tanh(a->value.data[i]);
    return t.make(std::move(out), {a}, [](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i) {
            const double y = node.value.data[i];
            node.parents[0]->grad.data[i] += node.grad.data[i] * (1.0 - y * y);
        }
    });
}

Var sigmoid(Tape& t, Var a) {
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-a->value.data[i]));
    return t.make(std::move(out), {a}, [](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i) {
            const double y = node.value.data[i];
            node.parents[0]->grad.data[i] += node.grad.data[i] * y * (1.0 - y);
        }
    });
}

Var layer_norm(Tape& t, Var x, Var gain, Var bias, double eps) {
    check2d(x);
    const std::size_t m = x->value.rows(), n = x->value.cols();
    if (gain->value.size() != n || bias->value.size() != n)
        throw std::logic_error("layer_norm parameter shape mismatch");
    Tensor out(x->value.shape);
    auto stats = std::make_shared<std::vector<double>>(2 * m);  // mean, 1/sqrt(var+eps) per row
    for (std::size_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += x->value(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x->value(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        (*stats)[2 * i] = mean;
        (*stats)[2 * i + 1] = inv;
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = (x->value(i, j) - mean) * inv * gain->value.data[j] + bias->value.data[j];
    }
    return t.make(std::move(out), {x, gain, bias}, [m, n, stats](Node& node, Tape&) {
        Var x = node.parents[0], gain = node.parents[1], bias = node.parents[2];
        for (std::size_t i = 0; i < m; ++i) {
            const double mean = (*stats)[2 * i];
            const double inv = (*stats)[2 * i + 1];
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double xhat = (x->value(i, j) - mean) * inv;
                const double dy = node.grad(i, j);
                const double dxhat = dy * gain->value.data[j];
                gain->grad.data[j] += dy * xhat;
                bias->grad.data[j] += dy;
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * xhat;
            }
            const double invn = 1.0 / static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double xhat = (x->value(i, j) - mean) * inv;
                const double dxhat = node.grad(i, j) * gain->value.data[j];
                x->grad(i, j) += inv * (dxhat - invn * sum_dxhat - xhat * invn * sum_dxhat_xhat);
            }
        }
    });
}

Var softmax_rows(Tape& t, Var a) {
    check2d(a);
    const std::size_t m = a->value.rows(), n = a->value.cols();
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < m; ++i) {
        double mx = a->value(i, 0);
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, a->value(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = std::exp(a->value(i, j) - mx);
            sum += out(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) out(i, j) /= sum;
    }
    return t.make(std::move(out), {a}, [m, n](Node& node, Tape&) {
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += node.grad(i, j) * node.value(i, j);
            for (std::size_t j = 0; j < n; ++j)
                node.parents[0]->grad(i, j) += node.value(i, j) * (node.grad(i, j) - dot);
        }
    });
}

Var dropout(Tape& t, Var a, double p, RngStream& rng, bool train) {
    if (!train || p <= 0.0) return a;
    // Inverted scaling: kept activations multiplied by 1/(1-p) at train time.
    auto mask = std::make_shared<std::vector<double>>(a->value.size());
    const double keep_scale = 1.0 / (1.0 - p);
    Tensor out(a->value.shape);
    for (std::size_t i = 0; i < out.size(); ++i) {
        (*mask)[i] = rng.uniform() < p ? 0.0 : keep_scale;
        out.data[i] = a->value.data[i] * (*mask)[i];
    }
    return t.make(std::move(out), {a}, [mask](Node& node, Tape&) {
        for (std::size_t i = 0; i < node.grad.size(); ++i)
            node.parents[0]->grad.data[i] += node.grad.data[i] * (*mask)[i];
    });
}

Var concat_cols(Tape& t, const std::vector<Var>& parts) {
    std::size_t total = 0;
    for (Var p : parts) {
        if (p->value.rows() != 1) throw std::logic_error("concat_cols expects row vectors");
        total += p->value.cols();
    }
    Tensor out({1, total});
    std::size_t off = 0;
    for (Var p : parts) {
        for (std::size_t j = 0; j < p->value.cols(); ++j) out.data[off + j] = p->value.data[j];
        off += p->value.cols();
    }
    return t.make(std::move(out), parts, [](Node& node, Tape&) {
        std::size_t off = 0;
        for (Var p : node.parents) {
            for (std::size_t j = 0; j < p->value.cols(); ++j)
                p->grad.data[j] += node.grad.data[off + j];
            off += p->value.cols();
        }
    });
}

Var select_row(Tape& t, Var a, std::size_t row) {
    check2d(a);
    const std::size_t n = a->value.cols();
    if (row >= a->value.rows()) throw std::logic_error("select_row out of range");
    Tensor out({1, n});
    for (std::size_t j = 0; j < n; ++j) out.data[j] = a->value(row, j);
    return t.make(std::move(out), {a}, [row, n](Node& node, Tape&) {
        for (std::size_t j = 0; j < n; ++j)
            node.parents[0]->grad(row, j) += node.grad.data[j];
    });
}

Var gather_rows(Tape& t, Var table, const std::vector<int>& ids) {
    check2d(table);
    const std::size_t n = table->value.cols();
    Tensor out({ids.size(), n});
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int id = ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= table->value.rows())
            throw std::out_of_range("gather_rows: id out of range");
        for (std::size_t j = 0; j < n; ++j) out(i, j) = table->value(static_cast<std::size_t>(id), j);
    }
    auto ids_copy = std::make_shared<std::vector<int>>(ids);
    return t.make(std::move(out), {table}, [ids_copy, n](Node& node, Tape&) {
        for (std::size_t i = 0; i < ids_copy->size(); ++i) {
            const auto id = static_cast<std::size_t>((*ids_copy)[i]);
            for (std::size_t j = 0; j < n; ++j)
                node.parents[0]->grad(id, j) += node.grad(i, j);
        }
    });
}

Var multi_head_self_attention(Tape& t, Var q, Var k, Var v, std::size_t num_heads,
                              double attn_dropout, RngStream& rng, bool train) {
    check2d(q);
    const std::size_t L = q->value.rows(), d = q->value.cols();
    if (!q->value.same_shape(k->value) || !q->value.same_shape(v->value))
        throw std::logic_error("attention input shape mismatch");
    if (d % num_heads != 0) throw std::logic_error("hidden size not divisible by heads");
    const std::size_t dh = d / num_heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

    // Per head: A = softmax(Q K^T / sqrt(dh)); Ahat = dropout(A); O = Ahat V.
    auto probs = std::make_shared<std::vector<double>>(num_heads * L * L);     // post-softmax A
    auto mask = std::make_shared<std::vector<double>>();                       // dropout mask
    const bool use_dropout = train && attn_dropout > 0.0;
    if (use_dropout) mask->assign(num_heads * L * L, 1.0);
    const double keep_scale = use_dropout ? 1.0 / (1.0 - attn_dropout) : 1.0;

    Tensor out({L, d});
    for (std::size_t h = 0; h < num_heads; ++h) {
        const std::size_t col0 = h * dh;
        double* A = probs->data() + h * L * L;
        for (std::size_t i = 0; i < L; ++i) {
            double mx = -1e300;
            for (std::size_t j = 0; j < L; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < dh; ++c)
                    s += q->value(i, col0 + c) * k->value(j, col0 + c);
                s *= inv_sqrt;
                A[i * L + j] = s;
                mx = std::max(mx, s);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < L; ++j) {
                A[i * L + j] = std::exp(A[i * L + j] - mx);
                sum += A[i * L + j];
            }
            for (std::size_t j = 0; j < L; ++j) A[i * L + j] /= sum;
        }
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j) {
                double a = A[i * L + j];
                if (use_dropout) {
                    const double mij = rng.uniform() < attn_dropout ? 0.0 : keep_scale;
                    (*mask)[h * L * L + i * L + j] = mij;
                    a *= mij;
                }
                for (std::size_t c = 0; c < dh; ++c)
                    out(i, col0 + c) += a * v->value(j, col0 + c);
            }
    }

    return t.make(std::move(out), {q, k, v},
                  [num_heads, L, dh, inv_sqrt, probs, mask, use_dropout](Node& node, Tape&) {
        Var q = node.parents[0], k = node.parents[1], v = node.parents[2];
        std::vector<double> dAhat(L * L), dA(L * L), dS(L * L);
        for (std::size_t h = 0; h < num_heads; ++h) {
            const std::size_t col0 = h * dh;
            const double* A = probs->data() + h * L * L;
            const double* M = use_dropout ? mask->data() + h * L * L : nullptr;
            // dAhat = dO V^T; dV += Ahat^T dO
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t j = 0; j < L; ++j) {
                    double s = 0.0;
                    const double ahat = A[i * L + j] * (M ? M[i * L + j] : 1.0);
                    for (std::size_t c = 0; c < dh; ++c) {
                        const double g = node.grad(i, col0 + c);
                        s += g * v->value(j, col0 + c);
                        v->grad(j, col0 + c) += ahat * g;
                    }
                    dAhat[i * L + j] = s;
                }
            // through dropout, then softmax rows
            for (std::size_t i = 0; i < L; ++i) {
                for (std::size_t j = 0; j < L; ++j)
                    dA[i * L + j] = dAhat[i * L + j] * (M ? M[i * L + j] : 1.0);
                double dot = 0.0;
                for (std::size_t j = 0; j < L; ++j) dot += dA[i * L + j] * A[i * L + j];
                for (std::size_t j = 0; j < L; ++j)
                    dS[i * L + j] = A[i * L + j] * (dA[i * L + j] - dot);
            }
            // dQ += dS K / sqrt(dh); dK += dS^T Q / sqrt(dh)
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t j = 0; j < L; ++j) {
                    const double g = dS[i * L + j] * inv_sqrt;
                    for (std::size_t c = 0; c < dh; ++c) {
                        q->grad(i, col0 + c) += g * k->value(j, col0 + c);
                        k->grad(j, col0 + c) += g * q->value(i, col0 + c);
                    }
                }
        }
    });
}

Var bce(Tape& t, Var p, double y) {
    if (p->value.size() != 1) throw std::logic_error("bce expects scalar probability");
    const double lo = 1e-12, hi = 1.0 - 1e-12;
    const double pc = std::min(hi, std::max(lo, p->value.data[0]));
    Tensor out = Tensor::scalar(-(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc)));
    return t.make(std::move(out), {p}, [y, lo, hi](Node& node, Tape&) {
        const double raw = node.parents[0]->value.data[0];
        if (raw < lo || raw > hi) return;  // flat in the clamped region
        node.parents[0]->grad.data[0] +=
            node.grad.data[0] * (-(y / raw) + (1.0 - y) / (1.0 - raw));
    });
}

Var sumsq(Tape& t, Var a) {
    double s = 0.0;
    for (double v : a->value.data) s += v * v;
    return t.make(Tensor::scalar(s), {a}, [](Node& node, Tape&) {
        const double g = node.grad.data[0];
        for (std::size_t i = 0; i < node.parents[0]->value.size(); ++i)
            node.parents[0]->grad.data[i] += g * 2.0 * node.parents[0]->value.data[i];
    });
}

}  // namespace ad
