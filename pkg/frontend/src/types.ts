// Wire types mirroring the service's frame schema.  The UI renders only
// what arrives in these frames; it never invents state locally.

export interface SceneObjectView {
  id: number
  kind: 'panel' | 'stud' | 'other'
  name: string
  size_ft: [number, number] | null
  area_label: string | null
  allowed_panel_size: [number, number] | null
  installed_on: number | null
  occupied_by: number | null
  destination: boolean
}

export interface StateFrame {
  type: 'state'
  session: string
  state: string
  approve_enabled: boolean
  pending_task: [number, number] | null
  pending_selections: Record<string, number>
  elapsed_s: number
  scene: { objects: SceneObjectView[] }
}

export interface ReplyFrame {
  type: 'reply'
  kind: string
  text: string
  cited_ids: Array<number | null>
  category: string | null
}

export interface HighlightFrame {
  type: 'highlight'
  object_id: number
  role: string
}

export interface RobotFrame {
  type: 'robot'
  phase: string
  target_id: number
  destination_id: number
  sequence: number
  detail: string
}

export type EventFrame = StateFrame | ReplyFrame | HighlightFrame | RobotFrame

export interface TranscriptEntry {
  speaker: string
  text: string
  timestamp?: number
}

export interface SessionView {
  sessionId: string
  state: string
  approveEnabled: boolean
  pendingTask: [number, number] | null
  pendingSelections: Record<string, number>
  elapsedS: number
  scene: SceneObjectView[]
  transcript: TranscriptEntry[]
  /** objectId -> highlight expiry (epoch ms); drives the transient red flash */
  highlights: Record<number, number>
  robotPhase: string | null
  notices: string[]
  /** input is disabled (dispatching or assistant call in flight) */
  busy: boolean
}
