from fractions import Fraction
from causal_infotheory import CausalQuery, Protocol, parse_scm
from causal_infotheory.metrics import causal_entropy_methods, causal_information_gain
from causal_infotheory.utils import print_quantity

GATE = """
scm gate {
  noise N_X ~ {x0: 9/10, x1: 1/10}
  noise N_Y ~ {y0: 1/2, y1: 1/2}
  var X : {x0, x1} = N_X
  var Y : {y0, y1} = if X = x0 then y0 else N_Y
}
"""


def run():
    model = parse_scm(GATE)
    protocol = Protocol.over(model, "X", [Fraction(1, 2), Fraction(1, 2)])
    q = CausalQuery(model, ("Y",), "X", protocol)
    methods = {m.value: f"{v:.12f}" for m, v in causal_entropy_methods(q).items()}
    # Intervening uniformly on a rarely-open gate tells less than observing Y
    print_quantity("Ic", f"{causal_information_gain(q):.12f}", q.describe(), methods)


if __name__ == "__main__":
    run()
