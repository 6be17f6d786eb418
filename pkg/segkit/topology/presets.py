"""The twelve named U-Net variants with the optimiser settings they are trained with."""

from segkit.nn.enums import Activation, ConvKind, OptimizerKind
from segkit.storages import topologies_storage
from segkit.topology.schemas import TopologyPreset, TopologySpec

ADAM_LR = 0.00033
RMSPROP_LR = 0.001
ADADELTA_LR = 1.0

# id, conv kind, multi-kernel, attention, ds_v1, ds_v2, ds_v3, activation, optimiser, learning rate
NAMED_TOPOLOGIES = (
    ("U1", ConvKind.U, False, False, False, False, False, Activation.RELU, OptimizerKind.ADADELTA, ADADELTA_LR),
    ("UA", ConvKind.U, False, True, False, False, False, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UD", ConvKind.U, False, False, False, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UAD", ConvKind.U, False, True, False, False, True, Activation.RELU, OptimizerKind.RMSPROP, RMSPROP_LR),
    ("UMD", ConvKind.U, True, False, False, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UAMD", ConvKind.U, True, True, False, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UVMD", ConvKind.V, True, False, False, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UVDD", ConvKind.V, False, False, True, False, True, Activation.PRELU, OptimizerKind.ADAM, ADAM_LR),
    ("UQD", ConvKind.Q, False, False, False, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UDD", ConvKind.U, False, False, True, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UMDD", ConvKind.U, True, False, True, False, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
    ("UDD2", ConvKind.U, False, False, False, True, True, Activation.RELU, OptimizerKind.ADAM, ADAM_LR),
)


def register_named_topologies():
    for topology_id, conv_kind, multi_kernel, attention, ds_v1, ds_v2, ds_v3, activation, optimizer, lr in (
        NAMED_TOPOLOGIES
    ):
        spec = TopologySpec(
            id=topology_id,
            conv_kind=conv_kind,
            multi_kernel=multi_kernel,
            attention=attention,
            ds_v1=ds_v1,
            ds_v2=ds_v2,
            ds_v3=ds_v3,
            activation=activation,
        )
        topologies_storage.add_topology(TopologyPreset(spec=spec, optimizer=optimizer, learning_rate=lr))


register_named_topologies()
