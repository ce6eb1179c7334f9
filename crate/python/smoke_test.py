"""Quick end-to-end check of the Python bindings."""

import os
import tempfile

import anneal_svm as asv


def main():
    train = asv.Dataset.generate("nonlinear2", 40, seed=1).with_noise(0.05, seed=2)
    test = asv.Dataset.generate("nonlinear2", 300, seed=3)
    assert len(train) == 40
    assert all(t in (-1, 1) for _, _, t in train.points())

    q = asv.QuboProblem.svm(train, gamma=10.0, base=2, bits=2, xi=0.0)
    assert q.num_vars == 80
    bits, energy = q.anneal(sweeps=300, restarts=4, seed=0)
    assert abs(q.energy(bits) - energy) < 1e-9
    alphas = asv.decode_alphas(bits, 2, 2, len(train))
    assert all(0.0 <= a <= 3.0 for a in alphas)

    small = asv.QuboProblem.svm(asv.Dataset([(0.2, 0.3, 1), (0.7, 0.6, -1)]), 1.0, 2, 2, 1.0)
    exact_bits, exact = small.brute_force()
    _, annealed = small.anneal(seed=4)
    assert annealed >= exact - 1e-9
    fields, couplings, offset = small.to_ising()
    assert len(fields) <= small.num_vars

    model = asv.Model.fit_qubo(train, 10.0, 2, 2, 0.0, sweeps=300, restarts=4)
    cm = model.evaluate(test)
    assert cm.true_pos + cm.false_pos + cm.true_neg + cm.false_neg == len(test)
    print("qubo", cm)

    classical = asv.Model.fit_classical(train)
    print("classical", classical.evaluate(test))
    assert classical.predict(0.5, 0.5) in (-1, 1)

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "model.json")
        model.save(path)
        again = asv.Model.load(path)
        assert again.alphas == model.alphas
        assert again.decision(0.5, 0.5) == model.decision(0.5, 0.5)

    try:
        asv.Dataset.generate("spiral", 10)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown problem should raise ValueError")

    print("smoke test ok")


if __name__ == "__main__":
    main()
