// WebSocket event stream: one consumer per session tab.

import type { EventFrame } from './types.js'

export function connectEvents(
  sessionId: string,
  onFrame: (frame: EventFrame) => void,
  onClose?: () => void,
): WebSocket {
  const protocol = location.protocol === 'https:' ? 'wss' : 'ws'
  const socket = new WebSocket(
    `${protocol}://${location.host}/session/${sessionId}/events`,
  )
  socket.onmessage = (event) => {
    try {
      onFrame(JSON.parse(event.data) as EventFrame)
    } catch {
      // malformed frame: ignore rather than corrupt the view
    }
  }
  if (onClose) {
    socket.onclose = onClose
  }
  return socket
}
