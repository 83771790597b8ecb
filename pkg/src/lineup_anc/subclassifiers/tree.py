"""CART decision tree with weighted Gini splits, a false-positive loss folded
into class weights, and weakest-link cost-complexity pruning.

The loss penalty multiplies the mass of not_elite observations, so a leaf
predicts elite only when the elite mass strictly exceeds loss_fp times the
not_elite mass. All mass comparisons resolve ties toward not_elite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import TrainingSet

_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class TreeParams:
    cp: float = 0.01      # -1 grows the full tree with no pruning
    loss_fp: float = 1.0  # penalty for predicting elite on a not_elite lineup

    def __post_init__(self):
        if not (self.cp == -1 or 0 <= self.cp <= 1):
            raise ValueError("cp must be -1 or in [0, 1]")
        if self.loss_fp < 1:
            raise ValueError("loss_fp must be >= 1")


@dataclass
class TreeNode:
    prediction: int
    mass_elite: float
    mass_not: float
    feature: int | None = None
    threshold: float = 0.0
    decrease: float = 0.0  # weighted Gini decrease of this split, root scale
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def leaf_risk(self) -> float:
        return min(self.mass_elite, self.mass_not)


def _gini(we: np.ndarray | float, wn: np.ndarray | float):
    total = we + wn
    return 1.0 - np.square(we / total) - np.square(wn / total)


def _best_split(x, w_elite, w_not, feat_indices):
    """Exhaustive midpoint search, vectorized over all candidate features at
    once. Ties resolve to the lowest feature index, then lowest threshold
    (feature-major argmax keeps the first occurrence)."""
    we_tot, wn_tot = w_elite.sum(), w_not.sum()
    total = we_tot + wn_tot
    cols = x[:, feat_indices]
    order = np.argsort(cols, axis=0, kind="stable")
    cs = np.take_along_axis(cols, order, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_node = _gini(we_tot, wn_tot)
        ce = np.cumsum(w_elite[order], axis=0)[:-1]
        cn = np.cumsum(w_not[order], axis=0)[:-1]
        wl = ce + cn
        wr = total - wl
        child = (wl * _gini(ce, cn)
                 + wr * _gini(we_tot - ce, wn_tot - cn)) / total
        valid = (cs[:-1] < cs[1:]) & (wl > 0) & (wr > 0)
        dec = np.where(valid, g_node - child, -np.inf)
    flat = int(np.argmax(dec.T))  # feature-major scan order for ties
    fi, bi = divmod(flat, dec.shape[0])
    if not dec[bi, fi] > _MIN_GAIN:
        return None
    thr = (cs[bi, fi] + cs[bi + 1, fi]) / 2.0
    return float(dec[bi, fi]), int(feat_indices[fi]), float(thr)


def grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    loss_fp: float = 1.0,
    max_depth: int | None = None,
    mtry: int | None = None,
    rng: np.random.Generator | None = None,
) -> TreeNode:
    """Grow an unpruned CART tree. mtry (with rng) samples a fresh feature
    subset at each split, as a random-forest member tree does."""
    fw = w * np.where(y == 1, 1.0, loss_fp)
    w_elite = fw * (y == 1)
    w_not = fw * (y == 0)
    total = fw.sum()
    d = x.shape[1]

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        we, wn = w_elite[idx].sum(), w_not[idx].sum()
        node = TreeNode(prediction=1 if we > wn else 0,
                        mass_elite=we / total, mass_not=wn / total)
        if we == 0 or wn == 0 or (max_depth is not None and depth >= max_depth):
            return node
        if mtry is not None and mtry < d:
            feats = np.sort(rng.choice(d, size=mtry, replace=False))
        else:
            feats = np.arange(d)
        found = _best_split(x[idx], w_elite[idx], w_not[idx], feats)
        if found is None:
            return node
        dec, f, thr = found
        mask = x[idx, f] <= thr
        node.feature = f
        node.threshold = thr
        node.decrease = dec * (we + wn) / total
        node.left = build(idx[mask], depth + 1)
        node.right = build(idx[~mask], depth + 1)
        return node

    return build(np.arange(x.shape[0]), 0)


def prune_tree(root: TreeNode, cp: float) -> TreeNode:
    """Weakest-link pruning: a subtree survives only if it lowers the
    loss-weighted risk by more than cp * root risk per added leaf."""
    root_risk = root.leaf_risk()

    def walk(node: TreeNode) -> tuple[float, int]:
        if node.is_leaf:
            return node.leaf_risk(), 1
        rl, ll = walk(node.left)
        rr, lr = walk(node.right)
        risk, leaves = rl + rr, ll + lr
        if node.leaf_risk() - risk <= cp * root_risk * (leaves - 1):
            node.feature = None
            node.left = node.right = None
            node.decrease = 0.0
            return node.leaf_risk(), 1
        return risk, leaves

    walk(root)
    return root


@dataclass
class DecisionTreeModel:
    root: TreeNode
    params: TreeParams
    n_features: int

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.empty(x.shape[0], dtype=int)
        for i, row in enumerate(x):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.prediction
        return out

    def split_features(self) -> list[int]:
        found = []

        def walk(node):
            if node is None or node.is_leaf:
                return
            found.append(node.feature)
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return found

    def gini_importance(self) -> np.ndarray:
        imp = np.zeros(self.n_features)

        def walk(node):
            if node is None or node.is_leaf:
                return
            imp[node.feature] += node.decrease
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return imp

    def to_dict(self) -> dict:
        nodes: list[dict] = []

        def emit(node) -> int:
            record = {"pred": node.prediction}
            pos = len(nodes)
            nodes.append(record)
            if not node.is_leaf:
                record.update(feature=node.feature, threshold=node.threshold,
                              decrease=node.decrease)
                record["left"] = emit(node.left)
                record["right"] = emit(node.right)
            return pos

        emit(self.root)
        return {"kind": "tree", "cp": self.params.cp, "loss_fp": self.params.loss_fp,
                "n_features": self.n_features, "nodes": nodes}

    @staticmethod
    def from_dict(d: dict) -> "DecisionTreeModel":
        nodes = d["nodes"]

        def build(i: int) -> TreeNode:
            rec = nodes[i]
            node = TreeNode(prediction=rec["pred"], mass_elite=0.0, mass_not=0.0)
            if "feature" in rec:
                node.feature = rec["feature"]
                node.threshold = rec["threshold"]
                node.decrease = rec.get("decrease", 0.0)
                node.left = build(rec["left"])
                node.right = build(rec["right"])
            return node

        return DecisionTreeModel(build(0), TreeParams(d["cp"], d["loss_fp"]),
                                 d["n_features"])


def fit_decision_tree(train: TrainingSet, params: TreeParams) -> DecisionTreeModel:
    classes = np.unique(train.y)
    if len(classes) == 1:
        stump = TreeNode(prediction=int(classes[0]), mass_elite=float(classes[0]),
                         mass_not=float(1 - classes[0]))
        return DecisionTreeModel(stump, params, train.d)
    root = grow_tree(train.x, train.y, train.w, loss_fp=params.loss_fp)
    if params.cp != -1:
        root = prune_tree(root, params.cp)
    return DecisionTreeModel(root, params, train.d)


def predict_tree(model: DecisionTreeModel, x: np.ndarray) -> np.ndarray:
    return model.predict(x)
