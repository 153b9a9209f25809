# Channel module - path loss, fading, rates

from .model import (
    ChannelModel,
    ChannelRealization,
    Fading,
    SignalKind,
    draw_channel,
    rates,
    sum_rate,
    node_signal,
    normalized_gso,
)
