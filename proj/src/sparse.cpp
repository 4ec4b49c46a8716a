#include "grf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

namespace grf::sparse {

SparseMatrix SparseMatrix::from_triplets(int n, const std::vector<Triplet>& triplets) {
    if (n <= 0) throw DomainError("SparseMatrix: order must be positive");
    std::vector<std::tuple<int, int, double>> lower;
    lower.reserve(triplets.size());
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw DomainError("SparseMatrix: triplet index out of range");
        lower.emplace_back(std::max(t.row, t.col), std::min(t.row, t.col), t.value);
    }
    std::sort(lower.begin(), lower.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<1>(a), std::get<0>(a)) < std::tie(std::get<1>(b), std::get<0>(b));
    });

    SparseMatrix m;
    m.n_ = n;
    m.col_ptr_.assign(n + 1, 0);
    std::size_t i = 0;
    while (i < lower.size()) {
        const int r = std::get<0>(lower[i]);
        const int c = std::get<1>(lower[i]);
        double v = 0.0;
        while (i < lower.size() && std::get<0>(lower[i]) == r && std::get<1>(lower[i]) == c)
            v += std::get<2>(lower[i++]);
        if (v != 0.0) {
            m.row_ind_.push_back(r);
            m.values_.push_back(v);
            ++m.col_ptr_[c + 1];
        }
    }
    std::partial_sum(m.col_ptr_.begin(), m.col_ptr_.end(), m.col_ptr_.begin());
    return m;
}

SparseMatrix SparseMatrix::from_csc(int n, std::vector<int> col_ptr, std::vector<int> row_ind,
                                    std::vector<double> values) {
    SparseMatrix m;
    m.n_ = n;
    m.col_ptr_ = std::move(col_ptr);
    m.row_ind_ = std::move(row_ind);
    m.values_ = std::move(values);
    return m;
}

double SparseMatrix::at(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw DomainError("SparseMatrix::at: index out of range");
    const int r = std::max(i, j);
    const int c = std::min(i, j);
    const auto begin = row_ind_.begin() + col_ptr_[c];
    const auto end = row_ind_.begin() + col_ptr_[c + 1];
    const auto it = std::lower_bound(begin, end, r);
    if (it == end || *it != r) return 0.0;
    return values_[static_cast<std::size_t>(it - row_ind_.begin())];
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (int c = 0; c < n_; ++c)
        for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
            out.push_back(Triplet{row_ind_[p], c, values_[p]});
    return out;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(n_, n_);
    for (int c = 0; c < n_; ++c)
        for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) {
            d(row_ind_[p], c) = values_[p];
            d(c, row_ind_[p]) = values_[p];
        }
    return d;
}

namespace {

// Full symmetric adjacency (both triangles, diagonal dropped).
std::vector<std::vector<int>> symmetric_adjacency(const SparseMatrix& a) {
    const int n = a.order();
    std::vector<std::vector<int>> adj(n);
    for (int c = 0; c < n; ++c)
        for (int p = a.col_ptr()[c]; p < a.col_ptr()[c + 1]; ++p) {
            const int r = a.row_ind()[p];
            if (r == c) continue;
            adj[r].push_back(c);
            adj[c].push_back(r);
        }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

// Approximate minimum degree on a quotient graph.  Degrees are the usual
// AMD-style upper bounds |A_u| + sum_e (|L_e| - 1); absorbed elements vanish
// when the pivot's element swallows them.
std::vector<int> amd_order(const SparseMatrix& a) {
    const int n = a.order();
    std::vector<std::vector<int>> adj = symmetric_adjacency(a);
    std::vector<std::vector<int>> node_elems(n);
    std::vector<std::vector<int>> elem_members;
    std::vector<char> elem_absorbed;
    std::vector<char> eliminated(n, 0);
    std::vector<int> degree(n, 0);
    std::vector<int> stamp(n, -1);

    using Entry = std::pair<int, int>;  // (degree, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (int v = 0; v < n; ++v) {
        degree[v] = static_cast<int>(adj[v].size());
        heap.emplace(degree[v], v);
    }

    std::vector<int> perm;
    perm.reserve(n);
    std::vector<int> pivot_members;
    for (int k = 0; k < n; ++k) {
        int v = -1;
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (!eliminated[u] && d == degree[u]) {
                v = u;
                break;
            }
        }
        if (v < 0) {  // isolated leftovers (possible with empty heap duplicates)
            for (int u = 0; u < n; ++u)
                if (!eliminated[u]) {
                    v = u;
                    break;
                }
        }
        eliminated[v] = 1;
        perm.push_back(v);

        // Members of the new element: live neighbours plus members of the
        // pivot's elements.
        pivot_members.clear();
        for (int u : adj[v])
            if (!eliminated[u] && stamp[u] != k) {
                stamp[u] = k;
                pivot_members.push_back(u);
            }
        for (int e : node_elems[v]) {
            if (elem_absorbed[e]) continue;
            for (int u : elem_members[e])
                if (!eliminated[u] && stamp[u] != k) {
                    stamp[u] = k;
                    pivot_members.push_back(u);
                }
            elem_absorbed[e] = 1;
            elem_members[e].clear();
            elem_members[e].shrink_to_fit();
        }
        const int ev = static_cast<int>(elem_members.size());
        elem_members.push_back(pivot_members);
        elem_absorbed.push_back(0);

        for (int u : pivot_members) {
            // Variables covered by the new element leave u's direct list.
            auto& au = adj[u];
            au.erase(std::remove_if(au.begin(), au.end(),
                                    [&](int w) { return eliminated[w] || stamp[w] == k; }),
                     au.end());
            auto& eu = node_elems[u];
            eu.erase(std::remove_if(eu.begin(), eu.end(), [&](int e) { return elem_absorbed[e]; }),
                     eu.end());
            eu.push_back(ev);
            int d = static_cast<int>(au.size());
            for (int e : eu) d += static_cast<int>(elem_members[e].size()) - 1;
            degree[u] = d;
            heap.emplace(d, u);
        }
    }
    return perm;
}

std::vector<int> rcm_order(const SparseMatrix& a) {
    const int n = a.order();
    std::vector<std::vector<int>> adj = symmetric_adjacency(a);
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> visited(n, 0);

    const auto bfs_levels = [&](int start, std::vector<int>& last_level) {
        std::vector<char> seen(n, 0);
        std::vector<int> frontier{start};
        seen[start] = 1;
        int depth = 0;
        last_level = frontier;
        while (!frontier.empty()) {
            std::vector<int> next;
            for (int u : frontier)
                for (int w : adj[u])
                    if (!seen[w]) {
                        seen[w] = 1;
                        next.push_back(w);
                    }
            if (next.empty()) break;
            last_level = next;
            frontier = std::move(next);
            ++depth;
        }
        return depth;
    };

    for (int root = 0; root < n; ++root) {
        if (visited[root]) continue;
        // Pseudo-peripheral start within this component.
        int start = root;
        std::vector<int> last;
        int ecc = bfs_levels(start, last);
        for (int iter = 0; iter < 4; ++iter) {
            int best = last.front();
            for (int u : last)
                if (adj[u].size() < adj[best].size() || (adj[u].size() == adj[best].size() && u < best))
                    best = u;
            std::vector<int> last2;
            const int ecc2 = bfs_levels(best, last2);
            if (ecc2 <= ecc) break;
            ecc = ecc2;
            start = best;
            last = std::move(last2);
        }

        std::queue<int> q;
        q.push(start);
        visited[start] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            order.push_back(u);
            std::vector<int> nbrs;
            for (int w : adj[u])
                if (!visited[w]) nbrs.push_back(w);
            std::sort(nbrs.begin(), nbrs.end(), [&](int x, int y) {
                return std::make_pair(adj[x].size(), x) < std::make_pair(adj[y].size(), y);
            });
            for (int w : nbrs) {
                visited[w] = 1;
                q.push(w);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

}  // namespace

Ordering reorder(OrderMethod method, const SparseMatrix& a) {
    Ordering ord;
    ord.method = method;
    switch (method) {
        case OrderMethod::natural:
            ord.perm.resize(a.order());
            std::iota(ord.perm.begin(), ord.perm.end(), 0);
            break;
        case OrderMethod::rcm:
            ord.perm = rcm_order(a);
            break;
        case OrderMethod::amd:
            ord.perm = amd_order(a);
            break;
    }
    return ord;
}

namespace {

// Row-wise view of the permuted lower triangle: for each row k, the entries
// (k, j) with j <= k of P A P^T, columns ascending.
struct PermutedRows {
    std::vector<int> ptr, col;
    std::vector<double> val;
};

PermutedRows permute_to_rows(const SparseMatrix& a, const std::vector<int>& perm) {
    const int n = a.order();
    std::vector<int> iperm(n);
    for (int k = 0; k < n; ++k) iperm[perm[k]] = k;

    std::vector<std::tuple<int, int, double>> entries;  // (new row, new col, value)
    entries.reserve(a.nnz());
    for (int c = 0; c < n; ++c)
        for (int p = a.col_ptr()[c]; p < a.col_ptr()[c + 1]; ++p) {
            const int ni = iperm[a.row_ind()[p]];
            const int nj = iperm[c];
            entries.emplace_back(std::max(ni, nj), std::min(ni, nj), a.values()[p]);
        }
    std::sort(entries.begin(), entries.end());

    PermutedRows rows;
    rows.ptr.assign(n + 1, 0);
    rows.col.reserve(entries.size());
    rows.val.reserve(entries.size());
    for (const auto& [r, c, v] : entries) ++rows.ptr[r + 1];
    std::partial_sum(rows.ptr.begin(), rows.ptr.end(), rows.ptr.begin());
    for (const auto& [r, c, v] : entries) {
        rows.col.push_back(c);
        rows.val.push_back(v);
    }
    return rows;
}

std::vector<int> elimination_tree(int n, const PermutedRows& rows) {
    std::vector<int> parent(n, -1), ancestor(n, -1);
    for (int k = 0; k < n; ++k) {
        for (int p = rows.ptr[k]; p < rows.ptr[k + 1]; ++p) {
            int i = rows.col[p];
            while (i != -1 && i < k) {
                const int next = ancestor[i];
                ancestor[i] = k;
                if (next == -1) parent[i] = k;
                i = next;
            }
        }
    }
    return parent;
}

// Nonzero pattern of row k of L: union of etree paths from the row's
// below-diagonal entries up to (but excluding) k, returned ascending.
void ereach(int k, const PermutedRows& rows, const std::vector<int>& parent,
            std::vector<int>& stamp, std::vector<int>& pattern) {
    pattern.clear();
    stamp[k] = k;
    for (int p = rows.ptr[k]; p < rows.ptr[k + 1]; ++p) {
        int i = rows.col[p];
        while (i != -1 && i < k && stamp[i] != k) {
            pattern.push_back(i);
            stamp[i] = k;
            i = parent[i];
        }
    }
    std::sort(pattern.begin(), pattern.end());
}

}  // namespace

CholFactor sparse_cholesky(const SparseMatrix& a, const Ordering& ord) {
    const int n = a.order();
    if (static_cast<int>(ord.perm.size()) != n)
        throw DomainError("sparse_cholesky: ordering size does not match matrix order");

    const PermutedRows rows = permute_to_rows(a, ord.perm);
    const std::vector<int> parent = elimination_tree(n, rows);

    double max_diag = 0.0;
    for (int k = 0; k < n; ++k)
        for (int p = rows.ptr[k]; p < rows.ptr[k + 1]; ++p)
            if (rows.col[p] == k) max_diag = std::max(max_diag, std::fabs(rows.val[p]));
    const double pivot_floor = 1e-12 * max_diag;

    // Symbolic pass: column counts of L.
    std::vector<int> stamp(n, -1), pattern;
    std::vector<int> count(n, 1);  // diagonal
    for (int k = 0; k < n; ++k) {
        ereach(k, rows, parent, stamp, pattern);
        for (int j : pattern) ++count[j];
    }
    std::vector<int> lp(n + 1, 0);
    for (int j = 0; j < n; ++j) lp[j + 1] = lp[j] + count[j];
    const long nnz_l = lp[n];
    std::vector<int> li(nnz_l);
    std::vector<double> lx(nnz_l);
    std::vector<int> cursor(lp.begin(), lp.end() - 1);

    // Numeric pass, row by row.
    std::fill(stamp.begin(), stamp.end(), -1);
    std::vector<double> x(n, 0.0);
    for (int k = 0; k < n; ++k) {
        ereach(k, rows, parent, stamp, pattern);
        double diag = 0.0;
        for (int p = rows.ptr[k]; p < rows.ptr[k + 1]; ++p) {
            if (rows.col[p] == k)
                diag = rows.val[p];
            else
                x[rows.col[p]] = rows.val[p];
        }
        for (int j : pattern) {
            const double lkj = x[j] / lx[lp[j]];  // first entry of column j is its diagonal
            x[j] = 0.0;
            for (int p = lp[j] + 1; p < cursor[j]; ++p) x[li[p]] -= lx[p] * lkj;
            diag -= lkj * lkj;
            li[cursor[j]] = k;
            lx[cursor[j]] = lkj;
            ++cursor[j];
        }
        if (!(diag > pivot_floor))
            throw FactorizationError("sparse_cholesky: non-positive pivot at index " +
                                         std::to_string(ord.perm[k]) + " (value " +
                                         std::to_string(diag) + ")",
                                     ord.perm[k]);
        li[cursor[k]] = k;
        lx[cursor[k]] = std::sqrt(diag);
        ++cursor[k];
    }

    CholFactor f;
    f.l = SparseMatrix::from_csc(n, std::move(lp), std::move(li), std::move(lx));
    f.ordering = ord;
    f.nnz_l = nnz_l;
    return f;
}

std::vector<double> solve(const CholFactor& factor, const std::vector<double>& b) {
    const int n = factor.l.order();
    if (static_cast<int>(b.size()) != n) throw DomainError("solve: dimension mismatch");
    const std::vector<int>& perm = factor.ordering.perm;
    const std::vector<int>& lp = factor.l.col_ptr();
    const std::vector<int>& li = factor.l.row_ind();
    const std::vector<double>& lx = factor.l.values();

    std::vector<double> y(n);
    for (int k = 0; k < n; ++k) y[k] = b[perm[k]];
    // L y' = y
    for (int j = 0; j < n; ++j) {
        y[j] /= lx[lp[j]];
        for (int p = lp[j] + 1; p < lp[j + 1]; ++p) y[li[p]] -= lx[p] * y[j];
    }
    // L^T x = y'
    for (int j = n - 1; j >= 0; --j) {
        double s = y[j];
        for (int p = lp[j] + 1; p < lp[j + 1]; ++p) s -= lx[p] * y[li[p]];
        y[j] = s / lx[lp[j]];
    }
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[perm[k]] = y[k];
    return x;
}

}  // namespace grf::sparse
