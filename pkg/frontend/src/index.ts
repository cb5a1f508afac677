export {
  COST_HEADER,
  CostRow,
  CsvError,
  RESULTS_HEADER,
  ResultRow,
  TRAJECTORY_HEADER,
  TrajectoryRow,
  parseCostCsv,
  parseResultsCsv,
  parseTrajectoryCsv,
} from "./schema.js";
export {
  EmptySeriesError,
  FigureKind,
  FigureSpec,
  renderConvergence,
  renderCostTime,
  renderFigure,
  renderTrajectory,
} from "./figures.js";
