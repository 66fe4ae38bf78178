"""Tool-using time series analysis: statistical tools, a ReAct agent loop,
and dataset pipeline utilities, backed by the C++ core."""

from ._tsart import (
    TimeSeries,
    bollinger_upper,
    call_tool,
    check_answer,
    ema,
    list_tools,
    load_series,
    macd,
    normalize_option,
    run_mock_episode,
    score_forecast,
    score_mcq,
    token_overlap_f1,
    tool_catalogue,
)

__all__ = [
    "TimeSeries",
    "bollinger_upper",
    "call_tool",
    "check_answer",
    "ema",
    "list_tools",
    "load_series",
    "macd",
    "normalize_option",
    "run_mock_episode",
    "score_forecast",
    "score_mcq",
    "token_overlap_f1",
    "tool_catalogue",
]
